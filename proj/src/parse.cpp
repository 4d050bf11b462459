#include <cctype>

#include "tasksyn/code.hpp"
#include "tasksyn/error.hpp"

namespace tasksyn {

namespace {

struct Token {
    enum class Kind { Ident, Number, Punct, End } kind = Kind::End;
    std::string text;
    int line = 1;
    int col = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_space();
            Token t;
            t.line = line_;
            t.col = col_;
            if (pos_ >= src_.size()) {
                out.push_back(t);
                return out;
            }
            char c = src_[pos_];
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                t.kind = Token::Kind::Ident;
                while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                    t.text += advance();
            } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '-') {
                t.kind = Token::Kind::Number;
                t.text += advance();
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) t.text += advance();
            } else if (c == '(' || c == ')' || c == '{' || c == '}' || c == ';' || c == ',') {
                t.kind = Token::Kind::Punct;
                t.text += advance();
            } else {
                throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
            }
            out.push_back(t);
        }
    }

private:
    char advance() {
        char c = src_[pos_++];
        if (c == '\n') {
            line_++;
            col_ = 1;
        } else {
            col_++;
        }
        return c;
    }

    void skip_space() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '#' || (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/')) {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else {
                break;
            }
        }
    }

    std::string_view src_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class Parser {
public:
    Parser(std::vector<Token> toks, Dialect d) : toks_(std::move(toks)), dialect_(d) {}

    Code program() {
        expect_ident("def");
        expect_ident("Run");
        expect("(");
        expect(")");
        expect("{");
        Code code;
        code.dialect = dialect_;
        code.body = list(true);
        expect("}");
        if (peek().kind != Token::Kind::End) fail("trailing input after program", peek());
        number_nodes(code);
        return code;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_++]; }

    [[noreturn]] void fail(const std::string& msg, const Token& t) const {
        std::string at = t.kind == Token::Kind::End ? "end of input" : "'" + t.text + "'";
        throw ParseError(msg + " at " + at, t.line, t.col);
    }

    bool is_punct(const char* p) const { return peek().kind == Token::Kind::Punct && peek().text == p; }

    void expect(const char* p) {
        if (!is_punct(p)) fail(std::string("expected '") + p + "'", peek());
        next();
    }

    void expect_ident(const char* w) {
        if (peek().kind != Token::Kind::Ident || peek().text != w) fail(std::string("expected '") + w + "'", peek());
        next();
    }

    std::vector<Stmt> list(bool top) {
        std::vector<Stmt> out;
        while (!is_punct("}")) {
            if (peek().kind == Token::Kind::End) fail("unterminated block", peek());
            if (is_punct(";") || is_punct(",")) {
                next();
                continue;
            }
            if (!out.empty() && out.back().kind == Stmt::Kind::RepeatUntil)
                fail("RepeatUntil must be the last top-level statement", peek());
            out.push_back(stmt(top));
        }
        return out;
    }

    std::vector<Stmt> block() {
        const Token& open = peek();
        expect("{");
        std::vector<Stmt> body = list(false);
        if (body.empty()) fail("empty block", open);
        expect("}");
        return body;
    }

    Condition cond_arg(bool allowGoal) {
        expect("(");
        const Token& t = next();
        auto c = t.kind == Token::Kind::Ident ? condition_from_string(t.text) : std::nullopt;
        if (!c) fail("unknown condition", t);
        if (*c == Condition::Goal && !allowGoal) fail("goal is only valid in RepeatUntil", t);
        if (*c != Condition::Goal && allowGoal) fail("RepeatUntil requires goal", t);
        if (*c != Condition::Goal && !condition_in_dialect(*c, dialect_))
            fail("condition not allowed in " + std::string(to_string(dialect_)), t);
        expect(")");
        return *c;
    }

    Stmt stmt(bool top) {
        const Token& t = next();
        if (t.kind != Token::Kind::Ident) fail("expected a statement", t);
        if (auto a = action_from_string(t.text)) {
            if (!action_in_dialect(*a, dialect_)) fail("action not allowed in " + std::string(to_string(dialect_)), t);
            return Stmt::act(*a);
        }
        if (t.text == "Repeat") {
            expect("(");
            const Token& num = next();
            if (num.kind != Token::Kind::Number) fail("expected iteration count", num);
            int k = std::stoi(num.text);
            if (k < 2 || k > 10) fail("iteration count out of range 2..10", num);
            expect(")");
            return Stmt::repeat(k, block());
        }
        if (t.text == "While") {
            if (dialect_ != Dialect::Karel) fail("While is not allowed in hoc", t);
            Condition c = cond_arg(false);
            return Stmt::whileLoop(c, block());
        }
        if (t.text == "RepeatUntil") {
            if (dialect_ != Dialect::Hoc) fail("RepeatUntil is not allowed in karel", t);
            if (!top) fail("RepeatUntil is only allowed at top level", t);
            cond_arg(true);
            return Stmt::repeatUntil(block());
        }
        if (t.text == "If") {
            Condition c = cond_arg(false);
            std::vector<Stmt> thenBody = block();
            if (peek().kind == Token::Kind::Ident && (peek().text == "Else" || peek().text == "else")) {
                next();
                return Stmt::ifElse(c, std::move(thenBody), block());
            }
            return Stmt::ifThen(c, std::move(thenBody));
        }
        fail("unknown statement", t);
    }

    std::vector<Token> toks_;
    size_t pos_ = 0;
    Dialect dialect_;
};

}  // namespace

Code parse_code(std::string_view text, Dialect dialect) {
    Parser p(Lexer(text).run(), dialect);
    return p.program();
}

}  // namespace tasksyn
