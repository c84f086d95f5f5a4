#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "one4all/xml.hpp"

namespace one4all::plan {

using ParamMap = std::map<std::string, std::string>;

// Heap-allocated value with deep-copy semantics; lets the node variant recurse.
template <typename T>
class Box {
public:
    Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}  // NOLINT(google-explicit-constructor)
    Box(const Box& other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
    Box(Box&&) noexcept = default;
    Box& operator=(const Box& other) {
        if (this != &other) ptr_ = std::make_unique<T>(*other.ptr_);
        return *this;
    }
    Box& operator=(Box&&) noexcept = default;
    ~Box() = default;

    T& operator*() { return *ptr_; }
    const T& operator*() const { return *ptr_; }
    T* operator->() { return ptr_.get(); }
    const T* operator->() const { return ptr_.get(); }

    friend bool operator==(const Box& a, const Box& b) { return *a.ptr_ == *b.ptr_; }

private:
    std::unique_ptr<T> ptr_;
};

struct Node;

struct Sequence {
    std::vector<Node> children;
    bool operator==(const Sequence&) const;
};

struct Task {
    std::string id;
    std::string action;
    ParamMap params;
    bool operator==(const Task&) const = default;
};

struct Branch {
    std::string outcome;
    Box<Node> body;
    bool operator==(const Branch&) const;
};

// Runs the branch whose outcome label matches the recorded outcome of task `on`.
struct Conditional {
    std::string on;
    std::vector<Branch> branches;  // distinct outcome labels, document order
    std::optional<Box<Node>> else_branch;
    bool operator==(const Conditional&) const;
};

struct Node {
    std::variant<Sequence, Task, Conditional> value;

    bool is_sequence() const { return std::holds_alternative<Sequence>(value); }
    bool is_task() const { return std::holds_alternative<Task>(value); }
    bool is_conditional() const { return std::holds_alternative<Conditional>(value); }
    const Sequence& sequence() const { return std::get<Sequence>(value); }
    const Task& task() const { return std::get<Task>(value); }
    const Conditional& conditional() const { return std::get<Conditional>(value); }

    bool operator==(const Node&) const = default;
};

Node make_sequence(std::vector<Node> children);
Node make_task(std::string id, std::string action, ParamMap params = {});
Node make_conditional(std::string on, std::vector<std::pair<std::string, Node>> branches,
                      std::optional<Node> else_branch = std::nullopt);

struct MissionPlan {
    std::string mission_id;
    std::string robot_id;
    Node root;
    std::string source_query;

    bool operator==(const MissionPlan&) const = default;
};

class PlanError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class XmlSyntaxError : public PlanError {
public:
    explicit XmlSyntaxError(const xml::SyntaxError& cause);
    xml::Location where() const noexcept { return where_; }

private:
    xml::Location where_;
};

// Grammar or behavior-tree invariant violation at `path`.
class TreeShapeError : public PlanError {
public:
    TreeShapeError(std::string path, const std::string& message, xml::Location where);
    const std::string& path() const noexcept { return path_; }
    xml::Location where() const noexcept { return where_; }

private:
    std::string path_;
    xml::Location where_;
};

MissionPlan parse_plan(std::string_view xml_text);
std::string serialize_plan(const MissionPlan& plan);

// A node visited in depth-first, left-to-right order, with its document path
// (e.g. /mission/sequence/task[2]).
struct NodeRef {
    const Node* node;
    std::string path;
};

std::vector<NodeRef> pre_order(const MissionPlan& plan);
std::vector<NodeRef> pre_order(MissionPlan&&) = delete;  // refs would dangle

// Atomic tasks are Task nodes whose outcome no conditional branches on;
// conditional tasks are Task nodes that at least one Conditional reads.
// total() is the number of Task nodes.
struct NodeCounts {
    std::size_t tasks = 0;
    std::size_t conditionals = 0;
    std::size_t conditional_nodes = 0;  // Conditional elements in the tree

    std::size_t total() const { return tasks + conditionals; }
    bool operator==(const NodeCounts&) const = default;
};

NodeCounts count_nodes(const MissionPlan& plan);

// Ids of tasks referenced by at least one Conditional.
std::vector<std::string> branched_task_ids(const Node& root);

// Lower-level tree construction shared with the validator. The builder walks
// the document in order, reports every grammar or invariant issue to the
// visitor and keeps going, so callers can collect all problems at once.
enum class ShapeIssueKind { Grammar, DuplicateTaskId, ForwardReference };

struct ShapeIssue {
    ShapeIssueKind kind;
    std::string path;
    std::string message;
    xml::Location where;
};

struct BranchLabel {
    std::string outcome;
    std::string path;
};

class TreeVisitor {
public:
    virtual ~TreeVisitor() = default;
    virtual void issue(ShapeIssue issue) = 0;
    // Called once per well-formed task element, in document order.
    virtual void task(const Task& /*task*/, const std::string& /*path*/, const xml::Element& /*element*/) {}
    // Called before the conditional's branches are walked. `referenced` is
    // null when `on` does not name a task guaranteed to have run by then.
    virtual void conditional(const std::string& /*on*/, const std::vector<BranchLabel>& /*branches*/,
                             const std::string& /*path*/, const Task* /*referenced*/) {}
};

// Returns the plan when the mission element itself is usable; nodes with
// grammar issues are dropped from the returned tree.
std::optional<MissionPlan> build_plan(const xml::Element& mission, TreeVisitor& visitor);

}  // namespace one4all::plan
