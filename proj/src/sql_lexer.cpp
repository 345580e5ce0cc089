#include "sql_lexer.hpp"

#include <array>
#include <unordered_set>

namespace squill::sql {

namespace {

const std::unordered_set<std::string>& keyword_set() {
    static const std::unordered_set<std::string> kws = {
        "SELECT", "FROM", "WHERE", "GROUP", "BY", "HAVING", "ORDER", "LIMIT",
        "OFFSET", "JOIN", "LEFT", "RIGHT", "FULL", "INNER", "OUTER", "CROSS",
        "NATURAL", "ON", "USING", "AS", "AND", "OR", "NOT", "IN", "IS",
        "NULL", "BETWEEN", "LIKE", "GLOB", "REGEXP", "MATCH", "ESCAPE",
        "CASE", "WHEN", "THEN", "ELSE", "END", "CAST", "EXISTS", "DISTINCT",
        "ALL", "UNION", "INTERSECT", "EXCEPT", "WITH", "RECURSIVE", "ASC",
        "DESC", "COLLATE", "ISNULL", "NOTNULL", "CURRENT_DATE",
        "CURRENT_TIME", "CURRENT_TIMESTAMP", "TRUE", "FALSE", "NULLS",
        "FIRST", "LAST", "TABLE", "VALUES", "INSERT", "UPDATE", "DELETE",
        "CREATE", "DROP", "ALTER",
    };
    return kws;
}

bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

}  // namespace

bool is_keyword(const std::string& upper) { return keyword_set().count(upper) > 0; }

std::vector<Token> lex(const std::string& sql) {
    std::vector<Token> out;
    std::size_t i = 0;
    const std::size_t n = sql.size();

    auto err = [&](const std::string& msg, std::size_t at) {
        throw ParseError(msg, at, "");
    };

    while (i < n) {
        char c = sql[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        // comments
        if (c == '-' && i + 1 < n && sql[i + 1] == '-') {
            while (i < n && sql[i] != '\n') ++i;
            continue;
        }
        if (c == '/' && i + 1 < n && sql[i + 1] == '*') {
            std::size_t start = i;
            i += 2;
            while (i + 1 < n && !(sql[i] == '*' && sql[i + 1] == '/')) ++i;
            if (i + 1 >= n) err("unterminated comment", start);
            i += 2;
            continue;
        }
        std::size_t start = i;
        if (c == '\'') {
            std::string value;
            ++i;
            bool closed = false;
            while (i < n) {
                if (sql[i] == '\'') {
                    if (i + 1 < n && sql[i + 1] == '\'') {
                        value += '\'';
                        i += 2;
                        continue;
                    }
                    ++i;
                    closed = true;
                    break;
                }
                value += sql[i++];
            }
            if (!closed) err("unterminated string literal", start);
            out.push_back({TokKind::String, value, start, false});
            continue;
        }
        if ((c == 'x' || c == 'X') && i + 1 < n && sql[i + 1] == '\'') {
            std::string hex;
            i += 2;
            while (i < n && sql[i] != '\'') {
                if (!std::isxdigit(static_cast<unsigned char>(sql[i])))
                    err("invalid blob literal", start);
                hex += static_cast<char>(std::toupper(static_cast<unsigned char>(sql[i])));
                ++i;
            }
            if (i >= n) err("unterminated blob literal", start);
            ++i;
            if (hex.size() % 2 != 0) err("odd-length blob literal", start);
            out.push_back({TokKind::Blob, "X'" + hex + "'", start, false});
            continue;
        }
        if (c == '"' || c == '`' || c == '[') {
            char close = c == '[' ? ']' : c;
            std::string name;
            ++i;
            bool closed = false;
            while (i < n) {
                if (sql[i] == close) {
                    if (close != ']' && i + 1 < n && sql[i + 1] == close) {
                        name += close;
                        i += 2;
                        continue;
                    }
                    ++i;
                    closed = true;
                    break;
                }
                name += sql[i++];
            }
            if (!closed) err("unterminated quoted identifier", start);
            if (name.empty()) err("empty quoted identifier", start);
            out.push_back({TokKind::Identifier, name, start, true});
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(sql[i + 1])))) {
            std::string num;
            if (c == '0' && i + 1 < n && (sql[i + 1] == 'x' || sql[i + 1] == 'X')) {
                num += sql[i++];
                num += sql[i++];
                while (i < n && std::isxdigit(static_cast<unsigned char>(sql[i]))) num += sql[i++];
                if (num.size() == 2) err("invalid hex literal", start);
            } else {
                while (i < n && std::isdigit(static_cast<unsigned char>(sql[i]))) num += sql[i++];
                if (i < n && sql[i] == '.') {
                    num += sql[i++];
                    while (i < n && std::isdigit(static_cast<unsigned char>(sql[i]))) num += sql[i++];
                }
                if (i < n && (sql[i] == 'e' || sql[i] == 'E')) {
                    num += sql[i++];
                    if (i < n && (sql[i] == '+' || sql[i] == '-')) num += sql[i++];
                    if (i >= n || !std::isdigit(static_cast<unsigned char>(sql[i])))
                        err("invalid exponent", start);
                    while (i < n && std::isdigit(static_cast<unsigned char>(sql[i]))) num += sql[i++];
                }
            }
            if (i < n && ident_start(sql[i])) err("invalid numeric literal", start);
            out.push_back({TokKind::Number, num, start, false});
            continue;
        }
        if (ident_start(c)) {
            std::string word;
            while (i < n && ident_char(sql[i])) word += sql[i++];
            std::string upper = to_upper(word);
            if (is_keyword(upper)) {
                out.push_back({TokKind::Keyword, upper, start, false});
            } else {
                out.push_back({TokKind::Identifier, word, start, false});
            }
            continue;
        }
        // operators, longest match first
        static const std::array<const char*, 9> two = {"<>", "<=", ">=", "==", "!=", "||",
                                                       "<<", ">>", "->"};
        bool matched = false;
        if (i + 1 < n) {
            std::string pair{sql[i], sql[i + 1]};
            for (const char* t : two) {
                if (pair == t) {
                    if (pair == "->") err("unsupported operator ->", start);
                    out.push_back({TokKind::Op, pair, start, false});
                    i += 2;
                    matched = true;
                    break;
                }
            }
        }
        if (matched) continue;
        switch (c) {
            case '(': case ')': case ',': case '.': case ';': case '*':
            case '+': case '-': case '/': case '%': case '<': case '>':
            case '=': case '&': case '|': case '~':
                out.push_back({TokKind::Op, std::string(1, c), start, false});
                ++i;
                break;
            case '?': case ':': case '@':
                err("bound parameters are not supported", start);
                break;
            default:
                err(std::string("unexpected character '") + c + "'", start);
        }
    }
    out.push_back({TokKind::End, "", n, false});
    return out;
}

}  // namespace squill::sql
