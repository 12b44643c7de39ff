#include "exrew/pgcl/parser.hpp"

#include <cctype>
#include <optional>
#include <vector>

#include "exrew/pgcl/expectation.hpp"

namespace exrew::pgcl {

namespace {

enum class Tok {
    Ident, Number, KwSkip, KwTick, KwIf, KwElse, KwWhile, KwInf, KwTrue, KwFalse,
    Assign,     // :=
    Semi, Comma, LBrace, RBrace, LParen, RParen, LBracket, RBracket,
    Plus, Minus, Star,
    Eq, Ne, Lt, Le, Gt, Ge,
    AndAnd, OrOr, Bang,
    End,
};

struct Token {
    Tok kind;
    std::string text;
    std::size_t line, column;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_ws_and_comments();
            if (pos_ >= text_.size()) break;
            out.push_back(next());
        }
        out.push_back({Tok::End, "", line_, col_});
        return out;
    }

private:
    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_ws_and_comments() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else {
                break;
            }
        }
    }

    [[noreturn]] void fail(const std::string& reason) { throw ParseError(line_, col_, reason); }

    Token next() {
        std::size_t line = line_, col = col_;
        char c = text_[pos_];
        auto tok = [&](Tok kind, std::string text) { return Token{kind, std::move(text), line, col}; };

        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string word;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
                word += text_[pos_];
                advance();
            }
            if (word == "skip") return tok(Tok::KwSkip, word);
            if (word == "tick") return tok(Tok::KwTick, word);
            if (word == "if") return tok(Tok::KwIf, word);
            if (word == "else") return tok(Tok::KwElse, word);
            if (word == "while") return tok(Tok::KwWhile, word);
            if (word == "inf") return tok(Tok::KwInf, word);
            if (word == "true") return tok(Tok::KwTrue, word);
            if (word == "false") return tok(Tok::KwFalse, word);
            return tok(Tok::Ident, word);
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            // Rationals lex greedily as "digits" or "digits/digits"; the
            // grammar has no division operator, so this is unambiguous.
            std::string num;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                num += text_[pos_];
                advance();
            }
            if (pos_ < text_.size() && text_[pos_] == '/' &&
                pos_ + 1 < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
                num += '/';
                advance();
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                    num += text_[pos_];
                    advance();
                }
            }
            return tok(Tok::Number, num);
        }

        auto two = [&](char second) {
            return pos_ + 1 < text_.size() && text_[pos_ + 1] == second;
        };
        switch (c) {
            case ':':
                if (two('=')) { advance(); advance(); return tok(Tok::Assign, ":="); }
                fail("expected ':='");
            case ';': advance(); return tok(Tok::Semi, ";");
            case ',': advance(); return tok(Tok::Comma, ",");
            case '{': advance(); return tok(Tok::LBrace, "{");
            case '}': advance(); return tok(Tok::RBrace, "}");
            case '(': advance(); return tok(Tok::LParen, "(");
            case ')': advance(); return tok(Tok::RParen, ")");
            case '[': advance(); return tok(Tok::LBracket, "[");
            case ']': advance(); return tok(Tok::RBracket, "]");
            case '+': advance(); return tok(Tok::Plus, "+");
            case '-': advance(); return tok(Tok::Minus, "-");
            case '*': advance(); return tok(Tok::Star, "*");
            case '=': advance(); return tok(Tok::Eq, "=");
            case '!':
                if (two('=')) { advance(); advance(); return tok(Tok::Ne, "!="); }
                advance();
                return tok(Tok::Bang, "!");
            case '<':
                if (two('=')) { advance(); advance(); return tok(Tok::Le, "<="); }
                advance();
                return tok(Tok::Lt, "<");
            case '>':
                if (two('=')) { advance(); advance(); return tok(Tok::Ge, ">="); }
                advance();
                return tok(Tok::Gt, ">");
            case '&':
                if (two('&')) { advance(); advance(); return tok(Tok::AndAnd, "&&"); }
                fail("expected '&&'");
            case '|':
                if (two('|')) { advance(); advance(); return tok(Tok::OrOr, "||"); }
                fail("expected '||'");
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1, col_ = 1;
};

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    StmtPtr program() {
        StmtPtr s = statement_seq();
        expect(Tok::End, "end of input");
        return s;
    }

    AExprPtr arith() {
        AExprPtr e = aexpr();
        expect(Tok::End, "end of input");
        return e;
    }

    BExprPtr boolean() {
        BExprPtr b = bexpr();
        expect(Tok::End, "end of input");
        return b;
    }

    Expectation expectation() {
        Expectation e = exp_sum();
        expect(Tok::End, "end of input");
        return e;
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = pos_ + ahead;
        return i < toks_.size() ? toks_[i] : toks_.back();
    }
    const Token& take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
    bool accept(Tok kind) {
        if (peek().kind == kind) {
            take();
            return true;
        }
        return false;
    }
    const Token& expect(Tok kind, const std::string& what) {
        if (peek().kind != kind) fail("expected " + what);
        return take();
    }
    [[noreturn]] void fail(const std::string& reason) const {
        const Token& t = peek();
        std::string got = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
        throw ParseError(t.line, t.column, reason + ", got " + got);
    }

    Rational rational_token() {
        const Token& t = expect(Tok::Number, "a rational literal");
        try {
            return parse_rational(t.text);
        } catch (const std::invalid_argument& e) {
            throw ParseError(t.line, t.column, e.what());
        }
    }

    // seq := item (';' item)*   right-folded into Seq nodes
    StmtPtr statement_seq() {
        std::vector<StmtPtr> items;
        items.push_back(statement_item());
        while (accept(Tok::Semi)) items.push_back(statement_item());
        StmtPtr s = items.back();
        for (std::size_t i = items.size() - 1; i-- > 0;) s = Stmt::seq(items[i], s);
        return s;
    }

    // item := atom choice-tail*
    StmtPtr statement_item() {
        StmtPtr s = statement_atom();
        while (peek().kind == Tok::LBracket) {
            take();
            if (accept(Tok::RBracket)) {
                s = Stmt::nondet_choice(s, braced_statement());
            } else {
                Rational p = rational_token();
                if (p < 0 || p > 1) fail("choice probability must lie in [0, 1]");
                expect(Tok::RBracket, "']'");
                s = Stmt::prob_choice(s, p, braced_statement());
            }
        }
        return s;
    }

    StmtPtr braced_statement() {
        expect(Tok::LBrace, "'{'");
        StmtPtr s = statement_seq();
        expect(Tok::RBrace, "'}'");
        return s;
    }

    StmtPtr statement_atom() {
        switch (peek().kind) {
            case Tok::KwSkip:
                take();
                return Stmt::skip();
            case Tok::KwTick: {
                take();
                expect(Tok::LParen, "'('");
                ExtValue r = accept(Tok::KwInf) ? ExtValue::infinity() : ExtValue(rational_token());
                expect(Tok::RParen, "')'");
                return Stmt::tick(std::move(r));
            }
            case Tok::Ident: {
                std::string var = take().text;
                expect(Tok::Assign, "':='");
                return Stmt::assign(std::move(var), aexpr());
            }
            case Tok::KwIf: {
                take();
                expect(Tok::LParen, "'('");
                BExprPtr guard = bexpr();
                expect(Tok::RParen, "')'");
                StmtPtr then_branch = braced_statement();
                expect(Tok::KwElse, "'else'");
                return Stmt::ite(std::move(guard), std::move(then_branch), braced_statement());
            }
            case Tok::KwWhile: {
                take();
                expect(Tok::LParen, "'('");
                BExprPtr guard = bexpr();
                expect(Tok::RParen, "')'");
                return Stmt::while_loop(std::move(guard), braced_statement());
            }
            case Tok::LBrace:
                return braced_statement();
            default:
                fail("expected a statement");
        }
    }

    // aexpr := term (('+'|'-') term)*     left-associative
    AExprPtr aexpr() {
        AExprPtr e = term();
        while (true) {
            if (accept(Tok::Plus))
                e = AExpr::add(e, term());
            else if (accept(Tok::Minus))
                e = AExpr::monus(e, term());
            else
                return e;
        }
    }

    AExprPtr term() {
        AExprPtr e = factor();
        while (accept(Tok::Star)) e = AExpr::mul(e, factor());
        return e;
    }

    AExprPtr factor() {
        switch (peek().kind) {
            case Tok::Number:
                return AExpr::literal(rational_token());
            case Tok::Ident:
                return AExpr::variable(take().text);
            case Tok::LParen: {
                take();
                AExprPtr e = aexpr();
                expect(Tok::RParen, "')'");
                return e;
            }
            default:
                fail("expected an arithmetic expression");
        }
    }

    // bexpr := bterm ('||' bterm)* ; bterm := bfactor ('&&' bfactor)*
    BExprPtr bexpr() {
        BExprPtr b = bterm();
        while (accept(Tok::OrOr)) b = BExpr::bor(b, bterm());
        return b;
    }

    BExprPtr bterm() {
        BExprPtr b = bfactor();
        while (accept(Tok::AndAnd)) b = BExpr::band(b, bfactor());
        return b;
    }

    std::optional<CmpOp> cmp_op() {
        switch (peek().kind) {
            case Tok::Eq: take(); return CmpOp::Eq;
            case Tok::Ne: take(); return CmpOp::Ne;
            case Tok::Lt: take(); return CmpOp::Lt;
            case Tok::Le: take(); return CmpOp::Le;
            case Tok::Gt: take(); return CmpOp::Gt;
            case Tok::Ge: take(); return CmpOp::Ge;
            default: return std::nullopt;
        }
    }

    BExprPtr bfactor() {
        switch (peek().kind) {
            case Tok::KwTrue: take(); return BExpr::btrue();
            case Tok::KwFalse: take(); return BExpr::bfalse();
            case Tok::Bang: {
                take();
                expect(Tok::LParen, "'(' after '!'");
                BExprPtr inner = bexpr();
                expect(Tok::RParen, "')'");
                return BExpr::bnot(std::move(inner));
            }
            case Tok::LParen: {
                // Could be a parenthesized boolean or the left side of a
                // comparison; try boolean first by scanning for a comparison
                // operator after the matching ')'.
                if (paren_is_boolean()) {
                    take();
                    BExprPtr inner = bexpr();
                    expect(Tok::RParen, "')'");
                    return inner;
                }
                [[fallthrough]];
            }
            default: {
                AExprPtr lhs = aexpr();
                auto op = cmp_op();
                if (!op) fail("expected a comparison operator");
                return BExpr::cmp(*op, std::move(lhs), aexpr());
            }
        }
    }

    // exp := eterm ('+' eterm)* ; eterm := efactor ('*' efactor)*
    Expectation exp_sum() {
        Expectation e = exp_term();
        while (accept(Tok::Plus)) e = Expectation::sum(e, exp_term());
        return e;
    }

    Expectation exp_term() {
        Expectation e = exp_factor();
        while (accept(Tok::Star)) e = Expectation::product(e, exp_factor());
        return e;
    }

    Expectation exp_factor() {
        switch (peek().kind) {
            case Tok::Number:
                return Expectation::constant(ExtValue(rational_token()));
            case Tok::KwInf:
                take();
                return Expectation::constant(ExtValue::infinity());
            case Tok::LBracket: {
                take();
                BExprPtr b = bexpr();
                expect(Tok::RBracket, "']'");
                return Expectation::iverson(std::move(b));
            }
            case Tok::Ident: {
                const std::string& name = peek().text;
                if ((name == "min" || name == "max") && peek(1).kind == Tok::LParen) {
                    bool is_min = name == "min";
                    take();
                    take();
                    Expectation a = exp_sum();
                    expect(Tok::Comma, "','");
                    Expectation b = exp_sum();
                    expect(Tok::RParen, "')'");
                    return is_min ? Expectation::min_of(std::move(a), std::move(b))
                                  : Expectation::max_of(std::move(a), std::move(b));
                }
                return Expectation::variable(take().text);
            }
            case Tok::LParen: {
                take();
                Expectation e = exp_sum();
                expect(Tok::RParen, "')'");
                return e;
            }
            default:
                fail("expected an expectation");
        }
    }

    // Distinguishes "(x < 1) && ..." from "(x + 1) < y": after the matching
    // ')' a comparison operator indicates the parenthesis was arithmetic.
    bool paren_is_boolean() const {
        std::size_t depth = 0;
        for (std::size_t i = pos_; i < toks_.size(); ++i) {
            Tok k = toks_[i].kind;
            if (k == Tok::LParen) ++depth;
            if (k == Tok::RParen) {
                if (--depth == 0) {
                    Tok after = i + 1 < toks_.size() ? toks_[i + 1].kind : Tok::End;
                    switch (after) {
                        case Tok::Eq: case Tok::Ne: case Tok::Lt:
                        case Tok::Le: case Tok::Gt: case Tok::Ge:
                        case Tok::Plus: case Tok::Minus: case Tok::Star:
                            return false;
                        default:
                            return true;
                    }
                }
            }
            if (k == Tok::End) break;
        }
        return true;
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

}  // namespace

StmtPtr parse_program(const std::string& text) {
    return Parser(Lexer(text).run()).program();
}

AExprPtr parse_aexpr(const std::string& text) {
    return Parser(Lexer(text).run()).arith();
}

BExprPtr parse_bexpr(const std::string& text) {
    return Parser(Lexer(text).run()).boolean();
}

Expectation parse_expectation(const std::string& text) {
    return Parser(Lexer(text).run()).expectation();
}

}  // namespace exrew::pgcl
