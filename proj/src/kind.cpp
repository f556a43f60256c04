#include "ccr/kind.hpp"

#include <cctype>

#include "ccr/errors.hpp"

namespace ccr {
namespace {

class KindParser {
public:
    explicit KindParser(std::string_view text) : text_(text) {}

    Kind parse_all()
    {
        Kind k = parse_kind();
        skip_space();
        if (pos_ != text_.size()) fail("trailing input");
        return k;
    }

private:
    Kind parse_kind()
    {
        skip_space();
        std::string word;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(text_[pos_++]))));
        if (word.empty()) fail("expected a kind name");

        if (word == "counter") return Kind::leaf(KindTag::counter);
        if (word == "addmult") return Kind::leaf(KindTag::addmult);
        if (word == "lww") return Kind::leaf(KindTag::lww);
        if (word == "eset") return Kind::leaf(KindTag::eset);
        if (word == "queue") return Kind::leaf(KindTag::queue);
        if (word == "text") return Kind::leaf(KindTag::text);
        if (word == "socialpost") return Kind::social_post();
        if (word == "socialmedia") return Kind::social_media();
        if (word == "tuple") {
            expect('(');
            std::vector<Kind> parts{parse_kind()};
            skip_space();
            while (peek() == ',') {
                ++pos_;
                parts.push_back(parse_kind());
                skip_space();
            }
            expect(')');
            return Kind::tuple(std::move(parts));
        }
        if (word == "map") {
            expect('(');
            Kind value = parse_kind();
            expect(')');
            return Kind::map(std::move(value));
        }
        fail("unknown kind '" + word + "'");
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    void skip_space()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    void expect(char c)
    {
        skip_space();
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    [[noreturn]] void fail(const std::string& what) const
    {
        throw KindError("bad replica kind '" + std::string(text_) + "' at " + std::to_string(pos_) +
                        ": " + what);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

std::string_view tag_name(KindTag tag)
{
    switch (tag) {
    case KindTag::counter: return "counter";
    case KindTag::addmult: return "addmult";
    case KindTag::lww: return "lww";
    case KindTag::eset: return "eset";
    case KindTag::queue: return "queue";
    case KindTag::text: return "text";
    case KindTag::tuple: return "tuple";
    case KindTag::map: return "map";
    }
    return "?";
}

Kind Kind::social_post()
{
    return tuple({leaf(KindTag::lww), leaf(KindTag::eset), leaf(KindTag::counter),
                  leaf(KindTag::counter)});
}

Kind Kind::social_media() { return map(social_post()); }

Kind Kind::parse(std::string_view text) { return KindParser(text).parse_all(); }

std::string Kind::name() const
{
    std::string out(tag_name(tag));
    if (!is_composite()) return out;
    out += '(';
    for (std::size_t i = 0; i < components.size(); ++i) {
        if (i) out += ',';
        out += components[i].name();
    }
    out += ')';
    return out;
}

const Kind& Kind::component(std::size_t i) const
{
    if (i >= components.size())
        throw KindError(name() + " has no component " + std::to_string(i));
    return components[i];
}

}  // namespace ccr
