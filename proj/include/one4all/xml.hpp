#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

// Minimal strict XML 1.0 reader/writer used by the schema and plan formats.
// Accepts elements, attributes, character data, CDATA, comments and
// processing instructions. DOCTYPE declarations and any entity reference
// other than the five predefined ones (plus numeric character references)
// are rejected, so no external resource is ever resolved.
namespace one4all::xml {

struct Location {
    std::size_t line = 1;
    std::size_t column = 1;
};

class SyntaxError : public std::runtime_error {
public:
    SyntaxError(const std::string& message, Location where);

    const std::string& detail() const noexcept { return detail_; }
    Location where() const noexcept { return where_; }

private:
    std::string detail_;
    Location where_;
};

struct Attribute {
    std::string name;
    std::string value;
};

struct Element {
    std::string name;
    std::vector<Attribute> attributes;  // document order
    std::vector<Element> children;      // element children only, document order
    std::string text;                   // concatenated character data of this element
    Location where;

    const std::string* attribute(std::string_view key) const;
    bool has_only_whitespace_text() const;
};

// Parses a complete document; returns its root element.
Element parse(std::string_view document);

// Escapes character data for use between tags.
std::string escape_text(std::string_view raw);
// Escapes an attribute value for use inside double quotes.
std::string escape_attribute(std::string_view raw);

// True when bytes form valid UTF-8 containing only XML 1.0 characters.
bool is_xml_text(std::string_view bytes);

}  // namespace one4all::xml
