#include "one4all/xml.hpp"

#include <algorithm>
#include <cstdint>
#include <sstream>

namespace one4all::xml {

namespace {

constexpr std::size_t kMaxDepth = 256;

std::string format_location(const std::string& message, Location where) {
    std::ostringstream out;
    out << "line " << where.line << ", column " << where.column << ": " << message;
    return out.str();
}

// Decodes one UTF-8 sequence at `pos`; returns its length or 0 when invalid.
std::size_t utf8_sequence(std::string_view s, std::size_t pos, char32_t& cp) {
    const auto b0 = static_cast<unsigned char>(s[pos]);
    std::size_t len = 0;
    if (b0 < 0x80) {
        cp = b0;
        return 1;
    } else if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        return 0;
    }
    if (pos + len > s.size()) return 0;
    for (std::size_t i = 1; i < len; ++i) {
        const auto b = static_cast<unsigned char>(s[pos + i]);
        if ((b & 0xC0) != 0x80) return 0;
        cp = (cp << 6) | (b & 0x3F);
    }
    // Overlong forms, surrogates and out-of-range code points.
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000)) return 0;
    if (cp >= 0xD800 && cp <= 0xDFFF) return 0;
    if (cp > 0x10FFFF) return 0;
    return len;
}

bool is_xml_char(char32_t cp) {
    if (cp == 0x9 || cp == 0xA || cp == 0xD) return true;
    if (cp < 0x20) return false;
    if (cp == 0xFFFE || cp == 0xFFFF) return false;
    return true;
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

bool is_name_start(char c) {
    const auto u = static_cast<unsigned char>(c);
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_' || c == ':' || u >= 0x80;
}

bool is_name_char(char c) {
    return is_name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.';
}

std::string normalize_line_endings(std::string_view in) {
    std::string out;
    out.reserve(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) {
        if (in[i] == '\r') {
            out.push_back('\n');
            if (i + 1 < in.size() && in[i + 1] == '\n') ++i;
        } else {
            out.push_back(in[i]);
        }
    }
    return out;
}

class Parser {
public:
    explicit Parser(std::string text) : src_(std::move(text)) {
        line_starts_.push_back(0);
        for (std::size_t i = 0; i < src_.size(); ++i) {
            if (src_[i] == '\n') line_starts_.push_back(i + 1);
        }
    }

    Element document() {
        check_characters();
        if (src_.compare(0, 3, "\xEF\xBB\xBF") == 0) pos_ = 3;
        misc(/*allow_decl=*/true);
        if (at_end()) fail("document has no root element");
        if (!lookahead("<") || lookahead("</")) fail("expected root element");
        Element root = element(0);
        misc(/*allow_decl=*/false);
        if (!at_end()) fail("content after the root element");
        return root;
    }

private:
    std::string src_;
    std::size_t pos_ = 0;
    std::vector<std::size_t> line_starts_;

    Location location(std::size_t at) const {
        auto it = std::upper_bound(line_starts_.begin(), line_starts_.end(), at);
        const std::size_t line_index = static_cast<std::size_t>(it - line_starts_.begin()) - 1;
        std::size_t column = 1;
        for (std::size_t i = line_starts_[line_index]; i < at && i < src_.size(); ++i) {
            if ((static_cast<unsigned char>(src_[i]) & 0xC0) != 0x80) ++column;
        }
        return {line_index + 1, column};
    }

    [[noreturn]] void fail(const std::string& message) const { fail_at(message, pos_); }
    [[noreturn]] void fail_at(const std::string& message, std::size_t at) const {
        throw SyntaxError(message, location(at));
    }

    bool at_end() const { return pos_ >= src_.size(); }
    bool lookahead(std::string_view token) const {
        return src_.compare(pos_, token.size(), token) == 0;
    }
    void expect(std::string_view token) {
        if (!lookahead(token)) fail("expected '" + std::string(token) + "'");
        pos_ += token.size();
    }
    void skip_space() {
        while (!at_end() && is_space(src_[pos_])) ++pos_;
    }

    void check_characters() const {
        std::size_t i = 0;
        while (i < src_.size()) {
            char32_t cp = 0;
            const std::size_t len = utf8_sequence(src_, i, cp);
            if (len == 0) fail_at("invalid UTF-8 sequence", i);
            if (!is_xml_char(cp)) fail_at("character not allowed in XML", i);
            i += len;
        }
    }

    void misc(bool allow_decl) {
        bool first = true;
        while (true) {
            if (allow_decl && first && lookahead("<?xml") && pos_ + 5 < src_.size() &&
                (is_space(src_[pos_ + 5]) || src_[pos_ + 5] == '?')) {
                processing_instruction();
            }
            first = false;
            skip_space();
            if (lookahead("<!--")) {
                comment();
            } else if (lookahead("<!DOCTYPE") || lookahead("<!ENTITY")) {
                fail("DTD and entity declarations are not allowed");
            } else if (lookahead("<?")) {
                if (lookahead("<?xml") && pos_ + 5 < src_.size() &&
                    (is_space(src_[pos_ + 5]) || src_[pos_ + 5] == '?')) {
                    fail("XML declaration must be at the start of the document");
                }
                processing_instruction();
            } else {
                return;
            }
        }
    }

    void comment() {
        const std::size_t start = pos_;
        pos_ += 4;
        const auto end = src_.find("--", pos_);
        if (end == std::string::npos) fail_at("unterminated comment", start);
        if (end + 2 >= src_.size() || src_[end + 2] != '>') fail_at("'--' not allowed inside comment", end);
        pos_ = end + 3;
    }

    void processing_instruction() {
        const std::size_t start = pos_;
        pos_ += 2;
        if (at_end() || !is_name_start(src_[pos_])) fail("malformed processing instruction");
        const auto end = src_.find("?>", pos_);
        if (end == std::string::npos) fail_at("unterminated processing instruction", start);
        pos_ = end + 2;
    }

    std::string name() {
        if (at_end() || !is_name_start(src_[pos_])) fail("expected a name");
        const std::size_t start = pos_;
        while (!at_end() && is_name_char(src_[pos_])) ++pos_;
        return src_.substr(start, pos_ - start);
    }

    // Decodes a reference starting at '&' and appends it to out.
    void reference(std::string& out) {
        const std::size_t start = pos_;
        const auto semi = src_.find(';', pos_);
        if (semi == std::string::npos || semi - pos_ > 12) fail_at("malformed entity reference", start);
        const std::string body = src_.substr(pos_ + 1, semi - pos_ - 1);
        pos_ = semi + 1;
        if (body == "lt") out.push_back('<');
        else if (body == "gt") out.push_back('>');
        else if (body == "amp") out.push_back('&');
        else if (body == "quot") out.push_back('"');
        else if (body == "apos") out.push_back('\'');
        else if (!body.empty() && body[0] == '#') {
            const bool hex = body.size() > 1 && body[1] == 'x';
            const std::string digits = body.substr(hex ? 2 : 1);
            if (digits.empty() || digits.size() > 8) fail_at("malformed character reference", start);
            char32_t cp = 0;
            for (char c : digits) {
                int v = -1;
                if (c >= '0' && c <= '9') v = c - '0';
                else if (hex && c >= 'a' && c <= 'f') v = c - 'a' + 10;
                else if (hex && c >= 'A' && c <= 'F') v = c - 'A' + 10;
                if (v < 0) fail_at("malformed character reference", start);
                cp = cp * (hex ? 16 : 10) + static_cast<char32_t>(v);
            }
            if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF) || !is_xml_char(cp)) {
                fail_at("character reference to a disallowed character", start);
            }
            append_utf8(out, cp);
        } else {
            fail_at("undefined entity '&" + body + ";' (only predefined entities are supported)", start);
        }
    }

    std::string attribute_value() {
        if (at_end() || (src_[pos_] != '"' && src_[pos_] != '\'')) fail("expected quoted attribute value");
        const char quote = src_[pos_++];
        std::string value;
        while (true) {
            if (at_end()) fail("unterminated attribute value");
            const char c = src_[pos_];
            if (c == quote) {
                ++pos_;
                return value;
            }
            if (c == '<') fail("'<' not allowed in attribute value");
            if (c == '&') {
                reference(value);
            } else {
                value.push_back(c == '\t' || c == '\n' ? ' ' : c);
                ++pos_;
            }
        }
    }

    Element element(std::size_t depth) {
        if (depth >= kMaxDepth) fail("element nesting too deep");
        Element el;
        el.where = location(pos_);
        expect("<");
        el.name = name();
        while (true) {
            const std::size_t before = pos_;
            skip_space();
            if (lookahead("/>")) {
                pos_ += 2;
                return el;
            }
            if (lookahead(">")) {
                ++pos_;
                break;
            }
            if (pos_ == before) fail("expected whitespace, '>' or '/>'");
            const std::size_t attr_at = pos_;
            Attribute attr;
            attr.name = name();
            skip_space();
            expect("=");
            skip_space();
            attr.value = attribute_value();
            if (el.attribute(attr.name) != nullptr) fail_at("duplicate attribute '" + attr.name + "'", attr_at);
            el.attributes.push_back(std::move(attr));
        }
        content(el, depth);
        return el;
    }

    void content(Element& el, std::size_t depth) {
        while (true) {
            if (at_end()) fail("unclosed element <" + el.name + ">");
            const char c = src_[pos_];
            if (c == '<') {
                if (lookahead("</")) {
                    pos_ += 2;
                    const std::size_t at = pos_;
                    const std::string closing = name();
                    if (closing != el.name) {
                        fail_at("mismatched end tag </" + closing + ">, expected </" + el.name + ">", at);
                    }
                    skip_space();
                    expect(">");
                    return;
                }
                if (lookahead("<!--")) {
                    comment();
                } else if (lookahead("<![CDATA[")) {
                    const std::size_t start = pos_;
                    pos_ += 9;
                    const auto end = src_.find("]]>", pos_);
                    if (end == std::string::npos) fail_at("unterminated CDATA section", start);
                    el.text.append(src_, pos_, end - pos_);
                    pos_ = end + 3;
                } else if (lookahead("<!")) {
                    fail("DTD and entity declarations are not allowed");
                } else if (lookahead("<?")) {
                    processing_instruction();
                } else {
                    el.children.push_back(element(depth + 1));
                }
            } else if (c == '&') {
                reference(el.text);
            } else {
                el.text.push_back(c);
                ++pos_;
            }
        }
    }
};

}  // namespace

SyntaxError::SyntaxError(const std::string& message, Location where)
    : std::runtime_error(format_location(message, where)), detail_(message), where_(where) {}

const std::string* Element::attribute(std::string_view key) const {
    for (const auto& a : attributes) {
        if (a.name == key) return &a.value;
    }
    return nullptr;
}

bool Element::has_only_whitespace_text() const {
    return std::all_of(text.begin(), text.end(), is_space);
}

Element parse(std::string_view document) {
    Parser parser(normalize_line_endings(document));
    return parser.document();
}

std::string escape_text(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (char c : raw) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '\r': out += "&#13;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string escape_attribute(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (char c : raw) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            case '\t': out += "&#9;"; break;
            case '\n': out += "&#10;"; break;
            case '\r': out += "&#13;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

bool is_xml_text(std::string_view bytes) {
    std::size_t i = 0;
    while (i < bytes.size()) {
        char32_t cp = 0;
        const std::size_t len = utf8_sequence(bytes, i, cp);
        if (len == 0 || !is_xml_char(cp)) return false;
        i += len;
    }
    return true;
}

}  // namespace one4all::xml
