#include "one4all/plan/plan.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_map>

#include "one4all/schema/action_pool.hpp"

namespace one4all::plan {

bool Sequence::operator==(const Sequence& other) const { return children == other.children; }
bool Branch::operator==(const Branch& other) const { return outcome == other.outcome && body == other.body; }
bool Conditional::operator==(const Conditional& other) const {
    return on == other.on && branches == other.branches && else_branch == other.else_branch;
}

Node make_sequence(std::vector<Node> children) { return Node{Sequence{std::move(children)}}; }

Node make_task(std::string id, std::string action, ParamMap params) {
    return Node{Task{std::move(id), std::move(action), std::move(params)}};
}

Node make_conditional(std::string on, std::vector<std::pair<std::string, Node>> branches,
                      std::optional<Node> else_branch) {
    Conditional c;
    c.on = std::move(on);
    for (auto& [label, body] : branches) c.branches.push_back(Branch{label, Box<Node>(std::move(body))});
    if (else_branch) c.else_branch = Box<Node>(std::move(*else_branch));
    return Node{std::move(c)};
}

namespace {

std::string describe(const xml::SyntaxError& e) { return "XML syntax error: " + std::string(e.what()); }

std::string shape_message(const std::string& path, const std::string& message, xml::Location where) {
    std::ostringstream out;
    out << "tree shape error at " << path << " (line " << where.line << ", column " << where.column
        << "): " << message;
    return out.str();
}

bool is_node_element(const std::string& name) {
    return name == "sequence" || name == "task" || name == "conditional";
}

// Walks the plan document. Task ids that are guaranteed to have been
// dispatched before a given point are tracked per scope: a Sequence makes the
// tasks of each completed child visible to later siblings, while tasks inside
// conditional branches never escape the branch.
class Builder {
public:
    explicit Builder(TreeVisitor& visitor) : visitor_(visitor) {}

    std::optional<MissionPlan> mission(const xml::Element& el) {
        const std::string path = "/mission";
        if (el.name != "mission") {
            grammar(path, "root element must be <mission>, found <" + el.name + ">", el);
            return std::nullopt;
        }
        MissionPlan plan;
        bool usable = true;
        for (const auto& a : el.attributes) {
            if (a.name != "id" && a.name != "robot") grammar(path, "unexpected attribute '" + a.name + "'", el);
        }
        if (const auto* id = el.attribute("id"); id != nullptr && schema::is_identifier(*id)) {
            plan.mission_id = *id;
        } else {
            grammar(path, id == nullptr ? "missing attribute 'id'" : "invalid mission id '" + *id + "'", el);
            usable = false;
        }
        if (const auto* robot = el.attribute("robot"); robot != nullptr && !robot->empty()) {
            plan.robot_id = *robot;
        } else {
            grammar(path, "missing attribute 'robot'", el);
            usable = false;
        }
        if (!el.has_only_whitespace_text()) grammar(path, "unexpected text inside <mission>", el);

        const xml::Element* root_el = nullptr;
        bool seen_query = false;
        for (const auto& child : el.children) {
            if (child.name == "query") {
                if (seen_query) grammar(path + "/query", "more than one <query>", child);
                if (!child.children.empty() || !child.attributes.empty()) {
                    grammar(path + "/query", "<query> must contain only text", child);
                }
                plan.source_query = child.text;
                seen_query = true;
            } else if (is_node_element(child.name)) {
                if (root_el != nullptr) {
                    grammar(path + "/" + child.name, "<mission> must contain exactly one root node", child);
                } else {
                    root_el = &child;
                }
            } else {
                grammar(path + "/" + child.name, "unexpected element <" + child.name + ">", child);
            }
        }
        if (root_el == nullptr) {
            grammar(path, "<mission> has no root node (expected <sequence>, <task> or <conditional>)", el);
            return std::nullopt;
        }
        std::set<std::string> visible;
        auto root = node(*root_el, path + "/" + root_el->name, visible);
        if (!root || !usable) return std::nullopt;
        plan.root = std::move(*root);
        return plan;
    }

private:
    TreeVisitor& visitor_;
    std::set<std::string> all_ids_;
    std::unordered_map<std::string, Task> tasks_by_id_;

    void grammar(const std::string& path, const std::string& message, const xml::Element& el) {
        visitor_.issue({ShapeIssueKind::Grammar, path, message, el.where});
    }

    void unexpected_attributes(const xml::Element& el, const std::string& path,
                               std::initializer_list<std::string_view> known) {
        for (const auto& a : el.attributes) {
            if (std::find(known.begin(), known.end(), a.name) == known.end()) {
                grammar(path, "unexpected attribute '" + a.name + "' on <" + el.name + ">", el);
            }
        }
    }

    // `visible` gains the ids this node guarantees once it has completed.
    std::optional<Node> node(const xml::Element& el, const std::string& path, std::set<std::string>& visible) {
        if (el.name == "sequence") return sequence(el, path, visible);
        if (el.name == "task") return task(el, path, visible);
        if (el.name == "conditional") return conditional(el, path, visible);
        grammar(path, "unknown element <" + el.name + ">", el);
        return std::nullopt;
    }

    std::optional<Node> sequence(const xml::Element& el, const std::string& path, std::set<std::string>& visible) {
        unexpected_attributes(el, path, {});
        if (!el.has_only_whitespace_text()) grammar(path, "unexpected text inside <sequence>", el);
        Sequence seq;
        std::unordered_map<std::string, std::size_t> counters;
        for (const auto& child : el.children) {
            const std::size_t index = ++counters[child.name];
            const std::string child_path = path + "/" + child.name + "[" + std::to_string(index) + "]";
            if (auto n = node(child, child_path, visible)) seq.children.push_back(std::move(*n));
        }
        return Node{std::move(seq)};
    }

    std::optional<Node> task(const xml::Element& el, const std::string& path, std::set<std::string>& visible) {
        unexpected_attributes(el, path, {"id", "action"});
        if (!el.has_only_whitespace_text()) grammar(path, "unexpected text inside <task>", el);
        Task t;
        bool ok = true;
        const auto* id = el.attribute("id");
        const auto* action = el.attribute("action");
        if (id == nullptr || !schema::is_identifier(*id)) {
            grammar(path, id == nullptr ? "task is missing attribute 'id'" : "invalid task id '" + *id + "'", el);
            ok = false;
        } else {
            t.id = *id;
        }
        if (action == nullptr || !schema::is_identifier(*action)) {
            grammar(path, action == nullptr ? "task is missing attribute 'action'" : "invalid action name '" + *action + "'",
                    el);
            ok = false;
        } else {
            t.action = *action;
        }
        std::size_t param_index = 0;
        for (const auto& child : el.children) {
            if (child.name != "param") {
                grammar(path + "/" + child.name, "unexpected element <" + child.name + "> inside <task>", child);
                ok = false;
                continue;
            }
            const std::string param_path = path + "/param[" + std::to_string(++param_index) + "]";
            unexpected_attributes(child, param_path, {"name"});
            const auto* name = child.attribute("name");
            if (name == nullptr || name->empty()) {
                grammar(param_path, "param is missing attribute 'name'", child);
                ok = false;
                continue;
            }
            if (!child.children.empty()) {
                grammar(param_path, "param value must be text", child);
                ok = false;
                continue;
            }
            if (!t.params.emplace(*name, child.text).second) {
                grammar(param_path, "duplicate param '" + *name + "'", child);
                ok = false;
            }
        }
        if (!ok) return std::nullopt;
        if (!all_ids_.insert(t.id).second) {
            visitor_.issue({ShapeIssueKind::DuplicateTaskId, path, "duplicate task id '" + t.id + "'", el.where});
        } else {
            tasks_by_id_.emplace(t.id, t);
        }
        visitor_.task(t, path, el);
        visible.insert(t.id);
        return Node{std::move(t)};
    }

    std::optional<Node> conditional(const xml::Element& el, const std::string& path,
                                    std::set<std::string>& visible) {
        unexpected_attributes(el, path, {"on"});
        if (!el.has_only_whitespace_text()) grammar(path, "unexpected text inside <conditional>", el);
        const auto* on = el.attribute("on");
        if (on == nullptr || !schema::is_identifier(*on)) {
            grammar(path, on == nullptr ? "conditional is missing attribute 'on'" : "invalid task reference '" + *on + "'",
                    el);
            return std::nullopt;
        }

        const Task* referenced = nullptr;
        if (visible.count(*on) > 0) {
            const auto it = tasks_by_id_.find(*on);
            if (it != tasks_by_id_.end()) referenced = &it->second;
        } else if (all_ids_.count(*on) > 0) {
            visitor_.issue({ShapeIssueKind::ForwardReference, path,
                            "conditional on '" + *on + "' is not guaranteed to run after that task", el.where});
        } else {
            visitor_.issue({ShapeIssueKind::ForwardReference, path,
                            "conditional on '" + *on + "' refers to a task that has not run before it", el.where});
        }

        std::vector<BranchLabel> labels;
        std::size_t branch_index = 0;
        for (const auto& child : el.children) {
            if (child.name == "branch") {
                const std::string branch_path = path + "/branch[" + std::to_string(++branch_index) + "]";
                const auto* outcome = child.attribute("outcome");
                if (outcome != nullptr) labels.push_back({*outcome, branch_path});
            }
        }
        visitor_.conditional(*on, labels, path, referenced);

        Conditional c;
        c.on = *on;
        bool ok = true;
        bool seen_else = false;
        branch_index = 0;
        std::set<std::string> labels_seen;
        for (const auto& child : el.children) {
            if (child.name == "branch") {
                const std::string branch_path = path + "/branch[" + std::to_string(++branch_index) + "]";
                unexpected_attributes(child, branch_path, {"outcome"});
                const auto* outcome = child.attribute("outcome");
                if (outcome == nullptr || !schema::is_outcome_label(*outcome)) {
                    grammar(branch_path,
                            outcome == nullptr ? "branch is missing attribute 'outcome'"
                                               : "invalid outcome label '" + *outcome + "'",
                            child);
                    ok = false;
                    continue;
                }
                if (!labels_seen.insert(*outcome).second) {
                    grammar(branch_path, "duplicate branch for outcome '" + *outcome + "'", child);
                    ok = false;
                    continue;
                }
                auto body = body_of(child, branch_path, visible);
                if (!body) {
                    ok = false;
                    continue;
                }
                c.branches.push_back(Branch{*outcome, Box<Node>(std::move(*body))});
            } else if (child.name == "else") {
                const std::string else_path = path + "/else";
                unexpected_attributes(child, else_path, {});
                if (seen_else) {
                    grammar(else_path, "more than one <else>", child);
                    ok = false;
                    continue;
                }
                seen_else = true;
                auto body = body_of(child, else_path, visible);
                if (!body) {
                    ok = false;
                    continue;
                }
                c.else_branch = Box<Node>(std::move(*body));
            } else {
                grammar(path + "/" + child.name, "unexpected element <" + child.name + "> inside <conditional>", child);
                ok = false;
            }
        }
        if (c.branches.empty() && !c.else_branch && ok) {
            grammar(path, "conditional needs at least one <branch> or an <else>", el);
            ok = false;
        }
        if (!ok) return std::nullopt;
        return Node{std::move(c)};
    }

    // Branch bodies see the enclosing scope but their tasks stay local.
    std::optional<Node> body_of(const xml::Element& el, const std::string& path,
                                const std::set<std::string>& visible) {
        if (!el.has_only_whitespace_text()) grammar(path, "unexpected text inside <" + el.name + ">", el);
        if (el.children.size() != 1) {
            grammar(path, "<" + el.name + "> must contain exactly one node", el);
            return std::nullopt;
        }
        const auto& child = el.children.front();
        std::set<std::string> local = visible;
        return node(child, path + "/" + child.name, local);
    }
};

class ThrowingVisitor : public TreeVisitor {
public:
    void issue(ShapeIssue issue) override { throw TreeShapeError(issue.path, issue.message, issue.where); }
};

void write_node(std::ostringstream& out, const Node& node, int depth) {
    const std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
    if (node.is_sequence()) {
        const auto& seq = node.sequence();
        if (seq.children.empty()) {
            out << indent << "<sequence/>\n";
            return;
        }
        out << indent << "<sequence>\n";
        for (const auto& child : seq.children) write_node(out, child, depth + 1);
        out << indent << "</sequence>\n";
    } else if (node.is_task()) {
        const auto& t = node.task();
        out << indent << "<task id=\"" << xml::escape_attribute(t.id) << "\" action=\""
            << xml::escape_attribute(t.action) << "\"";
        if (t.params.empty()) {
            out << "/>\n";
            return;
        }
        out << ">\n";
        for (const auto& [name, value] : t.params) {
            out << indent << "  <param name=\"" << xml::escape_attribute(name) << "\">" << xml::escape_text(value)
                << "</param>\n";
        }
        out << indent << "</task>\n";
    } else {
        const auto& c = node.conditional();
        out << indent << "<conditional on=\"" << xml::escape_attribute(c.on) << "\">\n";
        for (const auto& b : c.branches) {
            out << indent << "  <branch outcome=\"" << xml::escape_attribute(b.outcome) << "\">\n";
            write_node(out, *b.body, depth + 2);
            out << indent << "  </branch>\n";
        }
        if (c.else_branch) {
            out << indent << "  <else>\n";
            write_node(out, **c.else_branch, depth + 2);
            out << indent << "  </else>\n";
        }
        out << indent << "</conditional>\n";
    }
}

std::string element_name(const Node& n) {
    if (n.is_sequence()) return "sequence";
    if (n.is_task()) return "task";
    return "conditional";
}

void collect(const Node& node, const std::string& path, std::vector<NodeRef>& out) {
    out.push_back({&node, path});
    if (node.is_sequence()) {
        std::unordered_map<std::string, std::size_t> counters;
        for (const auto& child : node.sequence().children) {
            const std::string name = element_name(child);
            collect(child, path + "/" + name + "[" + std::to_string(++counters[name]) + "]", out);
        }
    } else if (node.is_conditional()) {
        const auto& c = node.conditional();
        std::size_t i = 0;
        for (const auto& b : c.branches) {
            const std::string bp = path + "/branch[" + std::to_string(++i) + "]";
            collect(*b.body, bp + "/" + element_name(*b.body), out);
        }
        if (c.else_branch) collect(**c.else_branch, path + "/else/" + element_name(**c.else_branch), out);
    }
}

}  // namespace

XmlSyntaxError::XmlSyntaxError(const xml::SyntaxError& cause) : PlanError(describe(cause)), where_(cause.where()) {}

TreeShapeError::TreeShapeError(std::string path, const std::string& message, xml::Location where)
    : PlanError(shape_message(path, message, where)), path_(std::move(path)), where_(where) {}

std::optional<MissionPlan> build_plan(const xml::Element& mission, TreeVisitor& visitor) {
    Builder builder(visitor);
    return builder.mission(mission);
}

MissionPlan parse_plan(std::string_view xml_text) {
    xml::Element root;
    try {
        root = xml::parse(xml_text);
    } catch (const xml::SyntaxError& e) {
        throw XmlSyntaxError(e);
    }
    ThrowingVisitor visitor;
    auto plan = build_plan(root, visitor);
    if (!plan) throw TreeShapeError("/mission", "unusable mission element", root.where);
    return std::move(*plan);
}

std::string serialize_plan(const MissionPlan& plan) {
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<mission id=\"" << xml::escape_attribute(plan.mission_id) << "\" robot=\""
        << xml::escape_attribute(plan.robot_id) << "\">\n";
    if (!plan.source_query.empty()) out << "  <query>" << xml::escape_text(plan.source_query) << "</query>\n";
    write_node(out, plan.root, 1);
    out << "</mission>\n";
    return out.str();
}

std::vector<NodeRef> pre_order(const MissionPlan& plan) {
    std::vector<NodeRef> out;
    collect(plan.root, "/mission/" + element_name(plan.root), out);
    return out;
}

namespace {

void collect_branched(const Node& node, std::set<std::string>& ids) {
    if (node.is_sequence()) {
        for (const auto& child : node.sequence().children) collect_branched(child, ids);
    } else if (node.is_conditional()) {
        const auto& c = node.conditional();
        ids.insert(c.on);
        for (const auto& b : c.branches) collect_branched(*b.body, ids);
        if (c.else_branch) collect_branched(**c.else_branch, ids);
    }
}

}  // namespace

std::vector<std::string> branched_task_ids(const Node& root) {
    std::set<std::string> ids;
    collect_branched(root, ids);
    return {ids.begin(), ids.end()};
}

NodeCounts count_nodes(const MissionPlan& plan) {
    const auto refs = pre_order(plan);
    std::set<std::string> branched;
    NodeCounts counts;
    for (const auto& ref : refs) {
        if (ref.node->is_conditional()) {
            branched.insert(ref.node->conditional().on);
            ++counts.conditional_nodes;
        }
    }
    for (const auto& ref : refs) {
        if (!ref.node->is_task()) continue;
        if (branched.count(ref.node->task().id) > 0) ++counts.conditionals;
        else ++counts.tasks;
    }
    return counts;
}

}  // namespace one4all::plan
