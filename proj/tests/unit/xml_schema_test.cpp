#include <gtest/gtest.h>

#include <algorithm>
#include <string>

#include "one4all/schema/action_pool.hpp"
#include "one4all/xml.hpp"
#include "support.hpp"

namespace one4all {
namespace {

using testing::corpus_pool;
using testing::corpus_pools;

std::size_t occurrences(const std::string& hay, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + needle.size())) ++n;
    return n;
}

TEST(Xml, ParsesElementsAttributesAndText) {
    const auto root = xml::parse("<?xml version=\"1.0\"?>\n<a x=\"1&amp;2\"><!-- c --><b>t&lt;u</b><![CDATA[<raw>]]></a>");
    EXPECT_EQ(root.name, "a");
    ASSERT_NE(root.attribute("x"), nullptr);
    EXPECT_EQ(*root.attribute("x"), "1&2");
    ASSERT_EQ(root.children.size(), 1u);
    EXPECT_EQ(root.children[0].text, "t<u");
    EXPECT_EQ(root.text, "<raw>");
}

TEST(Xml, ReportsLineAndColumn) {
    try {
        xml::parse("<a>\n  <b></c>\n</a>");
        FAIL() << "expected SyntaxError";
    } catch (const xml::SyntaxError& e) {
        EXPECT_EQ(e.where().line, 2u);
        EXPECT_GT(e.where().column, 1u);
    }
}

TEST(Xml, RejectsDoctypeAndCustomEntities) {
    EXPECT_THROW(xml::parse("<!DOCTYPE a [<!ENTITY e \"x\">]><a>&e;</a>"), xml::SyntaxError);
    EXPECT_THROW(xml::parse("<a>&nbsp;</a>"), xml::SyntaxError);
    EXPECT_EQ(xml::parse("<a>&#233;&#x41;</a>").text, "\xc3\xa9" "A");
}

TEST(Xml, RejectsInvalidUtf8AndTrailingContent) {
    EXPECT_THROW(xml::parse("<a>\xff</a>"), xml::SyntaxError);
    EXPECT_THROW(xml::parse("<a/><b/>"), xml::SyntaxError);
    EXPECT_THROW(xml::parse(""), xml::SyntaxError);
}

TEST(Xml, EscapeRoundTrip) {
    const std::string raw = "a<b>&\"c'\r\n";
    const auto doc = "<x v=\"" + xml::escape_attribute(raw) + "\">" + xml::escape_text(raw) + "</x>";
    const auto root = xml::parse(doc);
    EXPECT_EQ(*root.attribute("v"), raw);
    EXPECT_EQ(root.text, raw);
}

TEST(Schema, HuskyPoolHasExactlyFourActions) {
    const auto& husky = corpus_pool("husky");
    std::vector<std::string> names;
    for (const auto& [name, spec] : husky.actions) names.push_back(name);
    EXPECT_EQ(names, (std::vector<std::string>{"goto_gps", "measure_co2", "read_temperature", "take_thermal_image"}));
}

TEST(Schema, KortexPoolContainsManipulationActions) {
    const auto& kortex = corpus_pool("kortex");
    for (const char* a : {"move_pose", "detect_object", "capture_image", "nbv", "pick"}) {
        EXPECT_NE(schema::lookup(kortex, a), nullptr) << a;
    }
}

TEST(Schema, EmptyDocumentIsSyntaxError) {
    EXPECT_THROW(schema::load_pool(""), schema::SchemaSyntaxError);
    EXPECT_THROW(schema::load_pool("<actionpool robot=\"r\" version=\"1\">"), schema::SchemaSyntaxError);
}

TEST(Schema, SemanticErrors) {
    const std::string dup =
        "<actionpool robot=\"r\" version=\"1\"><action name=\"a\"><outcome>success</outcome><outcome>failure</outcome>"
        "</action><action name=\"a\"><outcome>success</outcome><outcome>failure</outcome></action></actionpool>";
    EXPECT_THROW(schema::load_pool(dup), schema::SchemaSemanticError);
    const std::string empty_enum =
        "<actionpool robot=\"r\" version=\"1\"><action name=\"a\"><param name=\"m\" kind=\"enum\" required=\"true\"/>"
        "<outcome>success</outcome><outcome>failure</outcome></action></actionpool>";
    EXPECT_THROW(schema::load_pool(empty_enum), schema::SchemaSemanticError);
    const std::string no_failure =
        "<actionpool robot=\"r\" version=\"1\"><action name=\"a\"><outcome>success</outcome></action></actionpool>";
    EXPECT_THROW(schema::load_pool(no_failure), schema::SchemaSemanticError);
    const std::string inverted_bounds =
        "<actionpool robot=\"r\" version=\"1\"><action name=\"a\"><param name=\"p\" kind=\"int\" required=\"true\" "
        "min=\"5\" max=\"1\"/><outcome>success</outcome><outcome>failure</outcome></action></actionpool>";
    EXPECT_THROW(schema::load_pool(inverted_bounds), schema::SchemaSemanticError);
    const std::string bounded_string =
        "<actionpool robot=\"r\" version=\"1\"><action name=\"a\"><param name=\"p\" kind=\"string\" required=\"true\" "
        "min=\"1\"/><outcome>success</outcome><outcome>failure</outcome></action></actionpool>";
    EXPECT_THROW(schema::load_pool(bounded_string), schema::SchemaSemanticError);
}

TEST(Schema, LookupCases) {
    const auto* go = schema::lookup(corpus_pool("husky"), "goto_gps");
    ASSERT_NE(go, nullptr);
    ASSERT_EQ(go->params.size(), 2u);
    EXPECT_EQ(go->params[0].name, "lat");
    EXPECT_EQ(go->params[1].name, "lon");
    EXPECT_EQ(schema::lookup(corpus_pool("husky"), "pick"), nullptr);
    const auto* nbv = schema::lookup(corpus_pool("kortex"), "nbv");
    ASSERT_NE(nbv, nullptr);
    ASSERT_NE(nbv->param("target_object"), nullptr);
    EXPECT_TRUE(nbv->param("target_object")->required);
}

TEST(Schema, RenderMentionsEachActionOnceAndIgnoresOrder) {
    const auto& husky = corpus_pool("husky");
    const auto text = schema::render_context({husky});
    for (const auto& [name, spec] : husky.actions) {
        EXPECT_EQ(occurrences(text, "ACTION " + name + " --"), 1u) << name << "\n" << text;
    }
    const auto pools = corpus_pools();
    std::vector<schema::ActionPool> reversed(pools.rbegin(), pools.rend());
    EXPECT_EQ(schema::render_context(pools), schema::render_context(reversed));
    EXPECT_THROW(schema::render_context({}), std::invalid_argument);
}

TEST(Schema, SerializeRoundTripOnCorpus) {
    for (const auto& pool : corpus_pools()) {
        EXPECT_EQ(schema::load_pool(schema::serialize_pool(pool)), pool) << pool.robot_id;
    }
}

// Random valid pools survive a serialize/load round trip and keep the
// action invariants.
TEST(Schema, RandomPoolRoundTripProperty) {
    testing::Rng rng(11);
    const schema::ParamKind kinds[] = {schema::ParamKind::String, schema::ParamKind::Int, schema::ParamKind::Float,
                                       schema::ParamKind::Bool, schema::ParamKind::Enum, schema::ParamKind::GpsPoint,
                                       schema::ParamKind::Pose6d};
    for (int iter = 0; iter < 200; ++iter) {
        schema::ActionPool pool;
        pool.robot_id = "r" + std::to_string(iter);
        pool.schema_version = std::to_string(rng() % 5) + ".0";
        const int actions = 1 + static_cast<int>(rng() % 5);
        for (int a = 0; a < actions; ++a) {
            schema::ActionSpec spec;
            spec.name = "act_" + std::to_string(a);
            spec.doc = testing::random_text(rng, 30);
            spec.outcomes = {"success", "failure"};
            if (rng() % 2) spec.outcomes.insert("low");
            const int params = static_cast<int>(rng() % 4);
            for (int p = 0; p < params; ++p) {
                schema::ParamSpec ps;
                ps.name = "p" + std::to_string(p);
                ps.kind = kinds[rng() % 7];
                ps.required = rng() % 2;
                if (ps.kind == schema::ParamKind::Enum) ps.allowed_values = {"a", "b"};
                if ((ps.kind == schema::ParamKind::Int || ps.kind == schema::ParamKind::Float) && rng() % 2) {
                    ps.min = -static_cast<double>(rng() % 10);
                    ps.max = static_cast<double>(rng() % 10);
                }
                spec.params.push_back(ps);
            }
            pool.actions[spec.name] = spec;
        }
        const auto back = schema::load_pool(schema::serialize_pool(pool));
        ASSERT_EQ(back, pool) << schema::serialize_pool(pool);
        for (const auto& [name, spec] : back.actions) {
            const auto* found = schema::lookup(back, name);
            ASSERT_NE(found, nullptr);
            EXPECT_TRUE(found->declares_outcome("success"));
            EXPECT_TRUE(found->declares_outcome("failure"));
            for (const auto& ps : found->params) {
                EXPECT_EQ(ps.kind == schema::ParamKind::Enum, !ps.allowed_values.empty());
            }
        }
    }
}

}  // namespace
}  // namespace one4all
