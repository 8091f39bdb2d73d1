#include "flexi/schema.hpp"

#include <cctype>
#include <set>
#include <sstream>

namespace flexi {

unsigned type_size_bytes(const ValueType& t) {
    return t.width_bytes;
}

std::string ValueType::token() const {
    switch (kind) {
    case ValueKind::UnsignedInt: return "uint" + std::to_string(width_bytes * 8);
    case ValueKind::SignedInt: return "int" + std::to_string(width_bytes * 8);
    case ValueKind::Bool: return "bool";
    case ValueKind::Address: return "address";
    case ValueKind::FixedBytes: return "bytes" + std::to_string(width_bytes);
    }
    return "?";
}

ValueType ValueType::from_token(const std::string& token) {
    auto parse_width = [&](std::size_t prefix_len) -> long {
        const std::string digits = token.substr(prefix_len);
        if (digits.empty() || digits.size() > 3) return -1;
        for (char c : digits)
            if (!std::isdigit(static_cast<unsigned char>(c))) return -1;
        if (digits[0] == '0') return -1;
        return std::stol(digits);
    };
    if (token == "bool") return {ValueKind::Bool, 1};
    if (token == "address") return {ValueKind::Address, 20};
    if (token.rfind("uint", 0) == 0) {
        long bits = parse_width(4);
        if (bits >= 8 && bits <= 256 && bits % 8 == 0)
            return {ValueKind::UnsignedInt, static_cast<unsigned>(bits / 8)};
    } else if (token.rfind("int", 0) == 0) {
        long bits = parse_width(3);
        if (bits >= 8 && bits <= 256 && bits % 8 == 0)
            return {ValueKind::SignedInt, static_cast<unsigned>(bits / 8)};
    } else if (token.rfind("bytes", 0) == 0) {
        long n = parse_width(5);
        if (n >= 1 && n <= 32) return {ValueKind::FixedBytes, static_cast<unsigned>(n)};
    }
    throw Error(ErrorCode::UnsupportedType, "unknown value type '" + token + "'");
}

std::string var_type_token(const VarType& t) {
    struct Visitor {
        std::string operator()(const ValueType& v) const { return v.token(); }
        std::string operator()(const FixedArrayType& v) const {
            return v.element.token() + "[" + std::to_string(v.length) + "]";
        }
        std::string operator()(const DynamicArrayType& v) const { return v.element.token() + "[]"; }
        std::string operator()(const MappingType& v) const {
            return "mapping(" + v.key.token() + " => " + v.value.token() + ")";
        }
    };
    return std::visit(Visitor{}, t);
}

bool var_types_equal(const VarType& a, const VarType& b) {
    return a == b;
}

const StateVariable* ContractSchema::find(const std::string& name) const {
    for (const auto& v : variables)
        if (v.name == name) return &v;
    return nullptr;
}

namespace {

struct Token {
    enum Kind { Ident, Number, Punct, End } kind;
    std::string text;
    int line;
    int col;
};

class Lexer {
public:
    explicit Lexer(const std::string& src) : src_(src) {}

    Token next() {
        skip_ws();
        int line = line_, col = col_;
        if (pos_ >= src_.size()) return {Token::End, "", line, col};
        char c = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string s;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                s += advance();
            return {Token::Ident, s, line, col};
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string s;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                s += advance();
            return {Token::Number, s, line, col};
        }
        // multi-char punct: "=>"
        if (c == '=' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
            advance();
            advance();
            return {Token::Punct, "=>", line, col};
        }
        std::string s(1, advance());
        return {Token::Punct, s, line, col};
    }

private:
    char advance() {
        char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip_ws() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else {
                break;
            }
        }
    }

    const std::string& src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class Parser {
public:
    explicit Parser(const std::string& src) : lexer_(src) { cur_ = lexer_.next(); }

    ContractSchema parse() {
        ContractSchema schema;
        expect_ident("contract");
        schema.contract_name = expect_kind(Token::Ident, "contract name").text;
        expect_punct("{");
        std::set<std::string> names;
        while (!(cur_.kind == Token::Punct && cur_.text == "}")) {
            if (cur_.kind == Token::End)
                fail("unexpected end of input, expected '}'");
            StateVariable var;
            var.var_type = parse_type();
            var.name = expect_kind(Token::Ident, "variable name").text;
            expect_punct(";");
            if (!names.insert(var.name).second)
                throw Error(ErrorCode::DuplicateVariable,
                            "variable '" + var.name + "' declared twice");
            var.decl_index = static_cast<std::uint32_t>(schema.variables.size());
            schema.variables.push_back(std::move(var));
        }
        expect_punct("}");
        if (cur_.kind != Token::End) fail("trailing input after contract body");
        return schema;
    }

private:
    VarType parse_type() {
        if (cur_.kind != Token::Ident) fail("expected a type");
        if (cur_.text == "mapping") {
            advance();
            expect_punct("(");
            ValueType key = parse_value_type("mapping key");
            expect_punct("=>");
            ValueType value = parse_value_type("mapping value");
            expect_punct(")");
            if (cur_.kind == Token::Punct && cur_.text == "[")
                throw Error(ErrorCode::UnsupportedType, "arrays of mappings are not supported");
            return MappingType{key, value};
        }
        ValueType base = parse_value_type("type");
        if (cur_.kind == Token::Punct && cur_.text == "[") {
            advance();
            if (cur_.kind == Token::Punct && cur_.text == "]") {
                advance();
                reject_extra_suffix();
                return DynamicArrayType{base};
            }
            Token len = expect_kind(Token::Number, "array length");
            std::uint64_t n = std::stoull(len.text);
            if (n < 1) fail("fixed array length must be >= 1");
            expect_punct("]");
            reject_extra_suffix();
            return FixedArrayType{base, n};
        }
        return base;
    }

    ValueType parse_value_type(const char* what) {
        if (cur_.kind != Token::Ident) fail(std::string("expected ") + what);
        if (cur_.text == "mapping")
            throw Error(ErrorCode::UnsupportedType, "nested mappings are not supported");
        ValueType vt = ValueType::from_token(cur_.text);
        advance();
        return vt;
    }

    void reject_extra_suffix() {
        if (cur_.kind == Token::Punct && cur_.text == "[")
            throw Error(ErrorCode::UnsupportedType, "nested arrays are not supported");
    }

    void advance() { cur_ = lexer_.next(); }

    Token expect_kind(Token::Kind kind, const char* what) {
        if (cur_.kind != kind) fail(std::string("expected ") + what);
        Token t = cur_;
        advance();
        return t;
    }

    void expect_ident(const std::string& word) {
        if (cur_.kind != Token::Ident || cur_.text != word)
            fail("expected '" + word + "'");
        advance();
    }

    void expect_punct(const std::string& p) {
        if (cur_.kind != Token::Punct || cur_.text != p)
            fail("expected '" + p + "'");
        advance();
    }

    [[noreturn]] void fail(const std::string& msg) {
        std::ostringstream os;
        os << "line " << cur_.line << ", col " << cur_.col << ": " << msg;
        if (cur_.kind != Token::End) os << " (got '" << cur_.text << "')";
        throw Error(ErrorCode::SyntaxError, os.str());
    }

    Lexer lexer_;
    Token cur_;
};

} // namespace

ContractSchema parse_schema(const std::string& source) {
    return Parser(source).parse();
}

std::string render_schema(const ContractSchema& schema) {
    std::ostringstream os;
    os << "contract " << schema.contract_name << " {\n";
    for (const auto& v : schema.variables)
        os << "  " << var_type_token(v.var_type) << " " << v.name << ";\n";
    os << "}\n";
    return os.str();
}

} // namespace flexi
