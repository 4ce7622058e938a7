#include "tremble/ltlf/parser.hpp"

#include <cctype>
#include <string>
#include <vector>

#include "tremble/errors.hpp"

namespace tremble::ltlf {
namespace {

enum class Tok { End, LParen, RParen, Not, And, Or, Implies, Iff, Next, WeakNext, Eventually, Always, Until, Release, True, False, Ident };

struct Token {
    Tok kind;
    std::size_t offset;
    std::string text;
};

std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < src.size()) {
        const char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        auto single = [&](Tok k) {
            out.push_back({k, start, std::string(1, c)});
            ++i;
        };
        switch (c) {
            case '(': single(Tok::LParen); continue;
            case ')': single(Tok::RParen); continue;
            case '!': single(Tok::Not); continue;
            case '&': single(Tok::And); continue;
            case '|': single(Tok::Or); continue;
            default: break;
        }
        if (src.substr(i, 2) == "->") {
            out.push_back({Tok::Implies, start, "->"});
            i += 2;
            continue;
        }
        if (src.substr(i, 3) == "<->") {
            out.push_back({Tok::Iff, start, "<->"});
            i += 3;
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            while (i < src.size() && (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) ++i;
            std::string word(src.substr(start, i - start));
            Tok k = Tok::Ident;
            if (word == "X") k = Tok::Next;
            else if (word == "N") k = Tok::WeakNext;
            else if (word == "F") k = Tok::Eventually;
            else if (word == "G") k = Tok::Always;
            else if (word == "U") k = Tok::Until;
            else if (word == "R") k = Tok::Release;
            else if (word == "true") k = Tok::True;
            else if (word == "false") k = Tok::False;
            out.push_back({k, start, std::move(word)});
            continue;
        }
        throw SyntaxError(start, {"formula"}, "'" + std::string(1, c) + "'");
    }
    out.push_back({Tok::End, src.size(), ""});
    return out;
}

class Parser {
public:
    Parser(std::string_view src, const PropSet* props, PropSet* declare)
        : toks_(lex(src)), props_(props), declare_(declare) {}

    Formula run() {
        Formula f = iff();
        expect(Tok::End, {"end of input", "'<->'", "'->'", "'|'", "'&'", "'U'", "'R'"});
        return f;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    bool accept(Tok k) {
        if (peek().kind != k) return false;
        ++pos_;
        return true;
    }
    void expect(Tok k, std::vector<std::string> expected) {
        if (!accept(k)) fail(std::move(expected));
    }
    [[noreturn]] void fail(std::vector<std::string> expected) const {
        const Token& t = peek();
        throw SyntaxError(t.offset, std::move(expected), t.kind == Tok::End ? "end of input" : "'" + t.text + "'");
    }

    static Formula implies(Formula a, Formula b) {
        return Formula::disjunction(Formula::negation(std::move(a)), std::move(b));
    }

    Formula iff() {
        Formula lhs = imp();
        while (accept(Tok::Iff)) {
            Formula rhs = imp();
            lhs = Formula::conjunction(implies(lhs, rhs), implies(rhs, lhs));
        }
        return lhs;
    }

    Formula imp() {
        Formula lhs = disj();
        if (accept(Tok::Implies)) return implies(std::move(lhs), imp());
        return lhs;
    }

    Formula disj() {
        Formula lhs = conj();
        while (accept(Tok::Or)) lhs = Formula::disjunction(std::move(lhs), conj());
        return lhs;
    }

    Formula conj() {
        Formula lhs = temporal();
        while (accept(Tok::And)) lhs = Formula::conjunction(std::move(lhs), temporal());
        return lhs;
    }

    Formula temporal() {
        Formula lhs = unary();
        if (accept(Tok::Until)) return Formula::until(std::move(lhs), temporal());
        if (accept(Tok::Release)) return Formula::release(std::move(lhs), temporal());
        return lhs;
    }

    Formula unary() {
        switch (peek().kind) {
            case Tok::Not: ++pos_; return Formula::negation(unary());
            case Tok::Next: ++pos_; return Formula::next(unary());
            case Tok::WeakNext: ++pos_; return Formula::weak_next(unary());
            case Tok::Eventually: ++pos_; return Formula::until(Formula::truth(), unary());
            case Tok::Always: ++pos_; return Formula::release(Formula::falsity(), unary());
            default: return primary();
        }
    }

    Formula primary() {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::True: ++pos_; return Formula::truth();
            case Tok::False: ++pos_; return Formula::falsity();
            case Tok::LParen: {
                ++pos_;
                Formula f = iff();
                expect(Tok::RParen, {"')'", "'<->'", "'->'", "'|'", "'&'", "'U'", "'R'"});
                return f;
            }
            case Tok::Ident: {
                ++pos_;
                if (declare_) return Formula::atom(declare_->add(t.text), t.text);
                auto id = props_->find(t.text);
                if (!id) throw UnknownAtom(t.text);
                return Formula::atom(*id, t.text);
            }
            default:
                fail({"atom", "'true'", "'false'", "'('", "'!'", "'X'", "'N'", "'F'", "'G'"});
        }
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    const PropSet* props_;
    PropSet* declare_;
};

}  // namespace

Formula parse(std::string_view text, const PropSet& props) { return Parser(text, &props, nullptr).run(); }

Formula parse_declaring(std::string_view text, PropSet& props) { return Parser(text, nullptr, &props).run(); }

}  // namespace tremble::ltlf
