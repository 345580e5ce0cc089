#include <optional>

#include "sql_lexer.hpp"
#include "squill/sql.hpp"

namespace squill::sql {

namespace {

class Parser {
public:
    explicit Parser(const std::string& text) : toks_(lex(text)) {}

    Node parse_statement() {
        Node stmt = parse_select();
        accept_op(";");
        if (!at_end()) fail("trailing input after statement", "end of statement");
        return stmt;
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;

    const Token& cur() const { return toks_[pos_]; }
    const Token& peek(std::size_t ahead = 1) const {
        std::size_t i = pos_ + ahead;
        return i < toks_.size() ? toks_[i] : toks_.back();
    }
    bool at_end() const { return cur().kind == TokKind::End; }

    [[noreturn]] void fail(const std::string& msg, const std::string& expected) const {
        throw ParseError(msg, cur().offset, expected);
    }

    bool is_kw(const char* kw) const {
        return cur().kind == TokKind::Keyword && cur().text == kw;
    }
    bool accept_kw(const char* kw) {
        if (is_kw(kw)) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect_kw(const char* kw) {
        if (!accept_kw(kw)) fail("unexpected token '" + cur().text + "'", kw);
    }
    bool is_op(const char* op) const { return cur().kind == TokKind::Op && cur().text == op; }
    bool accept_op(const char* op) {
        if (is_op(op)) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect_op(const char* op) {
        if (!accept_op(op)) fail("unexpected token '" + cur().text + "'", op);
    }

    std::string expect_name(const char* what) {
        if (cur().kind != TokKind::Identifier) fail("unexpected token '" + cur().text + "'", what);
        std::string name = cur().text;
        ++pos_;
        return name;
    }

    // ----- statements -----

    Node parse_select() {
        Node stmt{NodeKind::Select, "", 0, {}};
        if (is_kw("WITH")) stmt.children.push_back(parse_with());
        if (!is_kw("SELECT"))
            fail("only SELECT statements are supported", "SELECT");
        stmt.children.push_back(parse_select_core());
        while (true) {
            Node op{NodeKind::CompoundOp, "", 0, {}};
            if (accept_kw("UNION")) {
                op.text = accept_kw("ALL") ? "UNION ALL" : "UNION";
            } else if (accept_kw("INTERSECT")) {
                op.text = "INTERSECT";
            } else if (accept_kw("EXCEPT")) {
                op.text = "EXCEPT";
            } else {
                break;
            }
            stmt.children.push_back(std::move(op));
            if (!is_kw("SELECT")) fail("compound operator must be followed by SELECT", "SELECT");
            stmt.children.push_back(parse_select_core());
        }
        if (is_kw("ORDER")) stmt.children.push_back(parse_order_by());
        if (is_kw("LIMIT")) stmt.children.push_back(parse_limit());
        return stmt;
    }

    Node parse_with() {
        expect_kw("WITH");
        Node with{NodeKind::With, "", 0, {}};
        if (accept_kw("RECURSIVE")) with.text = "RECURSIVE";
        do {
            Node cte{NodeKind::Cte, expect_name("common table expression name"), 0, {}};
            if (accept_op("(")) {
                Node cols{NodeKind::IdentList, "", 0, {}};
                do {
                    cols.children.push_back(
                        {NodeKind::Identifier, expect_name("column name"), 0, {}});
                } while (accept_op(","));
                expect_op(")");
                cte.children.push_back(std::move(cols));
            }
            expect_kw("AS");
            expect_op("(");
            cte.children.push_back(parse_select());
            expect_op(")");
            with.children.push_back(std::move(cte));
        } while (accept_op(","));
        return with;
    }

    Node parse_select_core() {
        expect_kw("SELECT");
        Node core{NodeKind::SelectCore, "", 0, {}};
        if (accept_kw("DISTINCT"))
            core.text = "DISTINCT";
        else if (accept_kw("ALL"))
            core.text = "ALL";
        Node list{NodeKind::SelectList, "", 0, {}};
        do {
            list.children.push_back(parse_select_item());
        } while (accept_op(","));
        core.children.push_back(std::move(list));
        if (is_kw("FROM")) core.children.push_back(parse_from());
        if (accept_kw("WHERE"))
            core.children.push_back({NodeKind::Where, "", 0, {parse_expr()}});
        if (accept_kw("GROUP")) {
            expect_kw("BY");
            Node gb{NodeKind::GroupBy, "", 0, {}};
            do {
                gb.children.push_back(parse_expr());
            } while (accept_op(","));
            core.children.push_back(std::move(gb));
            if (accept_kw("HAVING"))
                core.children.push_back({NodeKind::Having, "", 0, {parse_expr()}});
        } else if (is_kw("HAVING")) {
            fail("HAVING without GROUP BY", "GROUP BY");
        }
        return core;
    }

    Node parse_select_item() {
        if (accept_op("*")) return {NodeKind::SelectItem, "", 0, {{NodeKind::Star, "", 0, {}}}};
        if (cur().kind == TokKind::Identifier && peek().kind == TokKind::Op &&
            peek().text == "." && peek(2).kind == TokKind::Op && peek(2).text == "*") {
            std::string table = cur().text;
            pos_ += 3;
            return {NodeKind::SelectItem, "", 0, {{NodeKind::TableStar, table, 0, {}}}};
        }
        Node item{NodeKind::SelectItem, "", 0, {parse_expr()}};
        if (accept_kw("AS")) {
            item.text = expect_name("alias");
        } else if (cur().kind == TokKind::Identifier) {
            item.text = cur().text;
            ++pos_;
        }
        return item;
    }

    Node parse_from() {
        expect_kw("FROM");
        Node from{NodeKind::From, "", 0, {parse_table_source()}};
        while (true) {
            std::string spec;
            if (accept_op(",")) {
                spec = ",";
            } else {
                bool natural = accept_kw("NATURAL");
                std::string kind;
                if (accept_kw("LEFT")) {
                    accept_kw("OUTER");
                    kind = "LEFT";
                } else if (accept_kw("RIGHT")) {
                    accept_kw("OUTER");
                    kind = "RIGHT";
                } else if (accept_kw("FULL")) {
                    accept_kw("OUTER");
                    kind = "FULL";
                } else if (accept_kw("INNER")) {
                    kind = "INNER";
                } else if (accept_kw("CROSS")) {
                    kind = "CROSS";
                }
                if (!is_kw("JOIN")) {
                    if (natural || !kind.empty()) fail("dangling join qualifier", "JOIN");
                    break;
                }
                expect_kw("JOIN");
                spec = natural ? "NATURAL " : "";
                spec += kind.empty() ? "JOIN" : kind + " JOIN";
            }
            Node join{NodeKind::Join, spec, 0, {parse_table_source()}};
            if (spec != "," && spec.find("NATURAL") == std::string::npos) {
                if (accept_kw("ON")) {
                    join.children.push_back({NodeKind::On, "", 0, {parse_expr()}});
                } else if (accept_kw("USING")) {
                    expect_op("(");
                    Node using_cols{NodeKind::Using, "", 0, {}};
                    do {
                        using_cols.children.push_back(
                            {NodeKind::Identifier, expect_name("column name"), 0, {}});
                    } while (accept_op(","));
                    expect_op(")");
                    join.children.push_back(std::move(using_cols));
                }
            }
            from.children.push_back(std::move(join));
        }
        return from;
    }

    Node parse_table_source() {
        if (accept_op("(")) {
            if (!is_kw("SELECT") && !is_kw("WITH"))
                fail("expected a subquery in FROM", "SELECT");
            Node sub{NodeKind::SubqueryRef, "", 0, {parse_select()}};
            expect_op(")");
            attach_alias(sub);
            return sub;
        }
        Node table{NodeKind::TableRef, expect_name("table name"), 0, {}};
        if (is_op("(")) fail("table-valued functions are not supported", "alias or join");
        attach_alias(table);
        return table;
    }

    void attach_alias(Node& source) {
        if (accept_kw("AS")) {
            source.children.push_back({NodeKind::Alias, expect_name("alias"), 0, {}});
        } else if (cur().kind == TokKind::Identifier) {
            source.children.push_back({NodeKind::Alias, cur().text, 0, {}});
            ++pos_;
        }
    }

    Node parse_order_by() {
        expect_kw("ORDER");
        expect_kw("BY");
        Node ob{NodeKind::OrderBy, "", 0, {}};
        do {
            Node item{NodeKind::OrderItem, "", 0, {parse_expr()}};
            if (accept_kw("ASC"))
                item.text = "ASC";
            else if (accept_kw("DESC"))
                item.text = "DESC";
            if (accept_kw("NULLS")) {
                if (accept_kw("FIRST"))
                    item.text += item.text.empty() ? "NULLS FIRST" : " NULLS FIRST";
                else if (accept_kw("LAST"))
                    item.text += item.text.empty() ? "NULLS LAST" : " NULLS LAST";
                else
                    fail("NULLS must be followed by FIRST or LAST", "FIRST");
            }
            ob.children.push_back(std::move(item));
        } while (accept_op(","));
        return ob;
    }

    Node parse_limit() {
        expect_kw("LIMIT");
        Node limit{NodeKind::Limit, "", 0, {}};
        Node first = parse_expr();
        if (accept_op(",")) {
            // LIMIT offset, count  ==  LIMIT count OFFSET offset
            Node count = parse_expr();
            limit.children.push_back(std::move(count));
            limit.children.push_back(std::move(first));
        } else {
            limit.children.push_back(std::move(first));
            if (accept_kw("OFFSET")) limit.children.push_back(parse_expr());
        }
        return limit;
    }

    // ----- expressions -----

    Node parse_expr() { return parse_or(); }

    Node parse_or() {
        Node lhs = parse_and();
        while (accept_kw("OR"))
            lhs = {NodeKind::BinaryOp, "OR", 0, {std::move(lhs), parse_and()}};
        return lhs;
    }

    Node parse_and() {
        Node lhs = parse_not();
        while (accept_kw("AND"))
            lhs = {NodeKind::BinaryOp, "AND", 0, {std::move(lhs), parse_not()}};
        return lhs;
    }

    Node parse_not() {
        if (is_kw("NOT") && !(peek().kind == TokKind::Keyword && peek().text == "EXISTS")) {
            expect_kw("NOT");
            return {NodeKind::UnaryOp, "NOT", 0, {parse_not()}};
        }
        return parse_comparison();
    }

    Node parse_comparison() {
        Node lhs = parse_inequality();
        while (true) {
            if (is_op("=") || is_op("==") || is_op("!=") || is_op("<>")) {
                std::string op = cur().text == "==" ? "=" : cur().text;
                if (op == "!=") op = "<>";
                ++pos_;
                lhs = {NodeKind::BinaryOp, op, 0, {std::move(lhs), parse_inequality()}};
            } else if (accept_kw("ISNULL")) {
                lhs = {NodeKind::UnaryOp, "ISNULL", 0, {std::move(lhs)}};
            } else if (accept_kw("NOTNULL")) {
                lhs = {NodeKind::UnaryOp, "NOTNULL", 0, {std::move(lhs)}};
            } else if (is_kw("IS")) {
                expect_kw("IS");
                bool negated = accept_kw("NOT");
                if (accept_kw("NULL")) {
                    lhs = {NodeKind::UnaryOp, negated ? "NOTNULL" : "ISNULL", 0, {std::move(lhs)}};
                } else {
                    lhs = {NodeKind::BinaryOp, negated ? "IS NOT" : "IS", 0,
                           {std::move(lhs), parse_inequality()}};
                }
            } else if (is_kw("BETWEEN") ||
                       (is_kw("NOT") && peek().kind == TokKind::Keyword &&
                        peek().text == "BETWEEN")) {
                bool negated = accept_kw("NOT");
                expect_kw("BETWEEN");
                Node lo = parse_inequality();
                expect_kw("AND");
                Node hi = parse_inequality();
                lhs = {NodeKind::Between, negated ? "NOT" : "", 0,
                       {std::move(lhs), std::move(lo), std::move(hi)}};
            } else if (is_kw("IN") ||
                       (is_kw("NOT") && peek().kind == TokKind::Keyword && peek().text == "IN")) {
                bool negated = accept_kw("NOT");
                expect_kw("IN");
                expect_op("(");
                Node rhs;
                if (is_kw("SELECT") || is_kw("WITH")) {
                    rhs = parse_select();
                } else {
                    rhs = {NodeKind::ExprList, "", 0, {}};
                    if (!is_op(")")) {
                        do {
                            rhs.children.push_back(parse_expr());
                        } while (accept_op(","));
                    }
                }
                expect_op(")");
                lhs = {NodeKind::InExpr, negated ? "NOT" : "", 0, {std::move(lhs), std::move(rhs)}};
            } else if (is_like_family() ||
                       (is_kw("NOT") && peek().kind == TokKind::Keyword &&
                        like_family_kw(peek().text))) {
                bool negated = accept_kw("NOT");
                std::string op = cur().text;
                ++pos_;
                Node rhs = parse_inequality();
                Node bin{NodeKind::BinaryOp, negated ? "NOT " + op : op, 0,
                         {std::move(lhs), std::move(rhs)}};
                if (accept_kw("ESCAPE")) bin.children.push_back(parse_inequality());
                lhs = std::move(bin);
            } else {
                break;
            }
        }
        return lhs;
    }

    static bool like_family_kw(const std::string& kw) {
        return kw == "LIKE" || kw == "GLOB" || kw == "REGEXP" || kw == "MATCH";
    }
    bool is_like_family() const {
        return cur().kind == TokKind::Keyword && like_family_kw(cur().text);
    }

    Node parse_inequality() {
        Node lhs = parse_bitop();
        while (is_op("<") || is_op("<=") || is_op(">") || is_op(">=")) {
            std::string op = cur().text;
            ++pos_;
            lhs = {NodeKind::BinaryOp, op, 0, {std::move(lhs), parse_bitop()}};
        }
        return lhs;
    }

    Node parse_bitop() {
        Node lhs = parse_term();
        while (is_op("&") || is_op("|") || is_op("<<") || is_op(">>")) {
            std::string op = cur().text;
            ++pos_;
            lhs = {NodeKind::BinaryOp, op, 0, {std::move(lhs), parse_term()}};
        }
        return lhs;
    }

    Node parse_term() {
        Node lhs = parse_factor();
        while (is_op("+") || is_op("-")) {
            std::string op = cur().text;
            ++pos_;
            lhs = {NodeKind::BinaryOp, op, 0, {std::move(lhs), parse_factor()}};
        }
        return lhs;
    }

    Node parse_factor() {
        Node lhs = parse_concat();
        while (is_op("*") || is_op("/") || is_op("%")) {
            std::string op = cur().text;
            ++pos_;
            lhs = {NodeKind::BinaryOp, op, 0, {std::move(lhs), parse_concat()}};
        }
        return lhs;
    }

    Node parse_concat() {
        Node lhs = parse_collate();
        while (is_op("||"))
            (void)accept_op("||"),
                lhs = {NodeKind::BinaryOp, "||", 0, {std::move(lhs), parse_collate()}};
        return lhs;
    }

    Node parse_collate() {
        Node lhs = parse_unary();
        while (accept_kw("COLLATE"))
            lhs = {NodeKind::Collate, expect_name("collation name"), 0, {std::move(lhs)}};
        return lhs;
    }

    Node parse_unary() {
        if (is_op("-") || is_op("+") || is_op("~")) {
            std::string op = cur().text;
            ++pos_;
            return {NodeKind::UnaryOp, op, 0, {parse_unary()}};
        }
        return parse_primary();
    }

    Node parse_primary() {
        const Token& t = cur();
        switch (t.kind) {
            case TokKind::Number:
            case TokKind::Blob: {
                Node lit{NodeKind::Literal, t.text, 0, {}};
                ++pos_;
                return lit;
            }
            case TokKind::String: {
                Node lit{NodeKind::Literal, encode_string(t.text), 0, {}};
                ++pos_;
                return lit;
            }
            case TokKind::Keyword:
                if (t.text == "NULL" || t.text == "TRUE" || t.text == "FALSE" ||
                    t.text == "CURRENT_DATE" || t.text == "CURRENT_TIME" ||
                    t.text == "CURRENT_TIMESTAMP") {
                    Node lit{NodeKind::Literal, t.text, 0, {}};
                    ++pos_;
                    return lit;
                }
                if (t.text == "CASE") return parse_case();
                if (t.text == "CAST") return parse_cast();
                if (t.text == "EXISTS") return parse_exists(false);
                if (t.text == "NOT" && peek().kind == TokKind::Keyword &&
                    peek().text == "EXISTS") {
                    ++pos_;
                    return parse_exists(true);
                }
                fail("unexpected keyword '" + t.text + "' in expression", "expression");
            case TokKind::Identifier:
                return parse_identifier_expr();
            case TokKind::Op:
                if (t.text == "(") {
                    ++pos_;
                    if (is_kw("SELECT") || is_kw("WITH")) {
                        Node sub{NodeKind::Subquery, "", 0, {parse_select()}};
                        expect_op(")");
                        return sub;
                    }
                    Node inner = parse_expr();
                    expect_op(")");
                    return inner;
                }
                fail("unexpected token '" + t.text + "' in expression", "expression");
            case TokKind::End:
                fail("unexpected end of input in expression", "expression");
        }
        fail("unreachable", "expression");
    }

    Node parse_identifier_expr() {
        std::string first = cur().text;
        ++pos_;
        if (accept_op("(")) {
            Node call{NodeKind::FuncCall, first, 0, {}};
            if (accept_kw("DISTINCT")) call.flag = 1;
            if (accept_op("*")) {
                call.children.push_back({NodeKind::Star, "", 0, {}});
            } else if (!is_op(")")) {
                do {
                    call.children.push_back(parse_expr());
                } while (accept_op(","));
            }
            expect_op(")");
            if (is_kw("OVER")) fail("window functions are not supported", ")");
            return call;
        }
        if (accept_op(".")) {
            std::string column = expect_name("column name");
            return {NodeKind::ColumnRef, column, 0, {{NodeKind::Identifier, first, 0, {}}}};
        }
        return {NodeKind::ColumnRef, first, 0, {}};
    }

    Node parse_case() {
        expect_kw("CASE");
        Node node{NodeKind::Case, "", 0, {}};
        if (!is_kw("WHEN")) node.children.push_back({NodeKind::CaseBase, "", 0, {parse_expr()}});
        if (!is_kw("WHEN")) fail("CASE requires at least one WHEN clause", "WHEN");
        while (accept_kw("WHEN")) {
            Node when_expr = parse_expr();
            expect_kw("THEN");
            Node then_expr = parse_expr();
            node.children.push_back(
                {NodeKind::CaseWhen, "", 0, {std::move(when_expr), std::move(then_expr)}});
        }
        if (accept_kw("ELSE")) node.children.push_back({NodeKind::CaseElse, "", 0, {parse_expr()}});
        expect_kw("END");
        return node;
    }

    Node parse_cast() {
        expect_kw("CAST");
        expect_op("(");
        Node inner = parse_expr();
        expect_kw("AS");
        std::string type_name;
        while (cur().kind == TokKind::Identifier || cur().kind == TokKind::Keyword) {
            if (!type_name.empty()) type_name += ' ';
            type_name += to_upper(cur().text);
            ++pos_;
        }
        if (type_name.empty()) fail("missing type name in CAST", "type name");
        if (accept_op("(")) {
            type_name += '(';
            type_name += expect_number();
            if (accept_op(",")) {
                type_name += ',';
                type_name += expect_number();
            }
            expect_op(")");
            type_name += ')';
        }
        expect_op(")");
        return {NodeKind::Cast, type_name, 0, {std::move(inner)}};
    }

    std::string expect_number() {
        if (cur().kind != TokKind::Number) fail("expected numeric size", "number");
        std::string v = cur().text;
        ++pos_;
        return v;
    }

    Node parse_exists(bool negated) {
        expect_kw("EXISTS");
        expect_op("(");
        Node node{NodeKind::Exists, negated ? "NOT" : "", 0, {parse_select()}};
        expect_op(")");
        return node;
    }

    static std::string encode_string(const std::string& value) {
        std::string out = "'";
        for (char c : value) {
            out += c;
            if (c == '\'') out += '\'';
        }
        out += '\'';
        return out;
    }
};

}  // namespace

Node parse_sql(const std::string& text) {
    if (trim(text).empty()) throw ParseError("empty statement", 0, "SELECT");
    Parser parser(text);
    return parser.parse_statement();
}

const Node* node_at(const Node& root, const NodePath& path) {
    const Node* n = &root;
    for (int idx : path) {
        if (idx < 0 || static_cast<std::size_t>(idx) >= n->children.size()) return nullptr;
        n = &n->children[static_cast<std::size_t>(idx)];
    }
    return n;
}

const char* node_kind_name(NodeKind kind) {
    switch (kind) {
        case NodeKind::Select: return "select";
        case NodeKind::With: return "with";
        case NodeKind::Cte: return "cte";
        case NodeKind::CompoundOp: return "compound-op";
        case NodeKind::SelectCore: return "select-core";
        case NodeKind::SelectList: return "select-list";
        case NodeKind::SelectItem: return "select-item";
        case NodeKind::Star: return "star";
        case NodeKind::TableStar: return "table-star";
        case NodeKind::From: return "from";
        case NodeKind::Join: return "join";
        case NodeKind::TableRef: return "table-ref";
        case NodeKind::SubqueryRef: return "subquery-ref";
        case NodeKind::Alias: return "alias";
        case NodeKind::On: return "on";
        case NodeKind::Using: return "using";
        case NodeKind::Where: return "where";
        case NodeKind::GroupBy: return "group-by";
        case NodeKind::Having: return "having";
        case NodeKind::OrderBy: return "order-by";
        case NodeKind::OrderItem: return "order-item";
        case NodeKind::Limit: return "limit";
        case NodeKind::ColumnRef: return "column-ref";
        case NodeKind::Identifier: return "identifier";
        case NodeKind::Literal: return "literal";
        case NodeKind::FuncCall: return "function-call";
        case NodeKind::BinaryOp: return "binary-op";
        case NodeKind::UnaryOp: return "unary-op";
        case NodeKind::Between: return "between";
        case NodeKind::InExpr: return "in";
        case NodeKind::ExprList: return "expr-list";
        case NodeKind::Case: return "case";
        case NodeKind::CaseBase: return "case-base";
        case NodeKind::CaseWhen: return "case-when";
        case NodeKind::CaseElse: return "case-else";
        case NodeKind::Cast: return "cast";
        case NodeKind::Exists: return "exists";
        case NodeKind::Subquery: return "subquery";
        case NodeKind::Collate: return "collate";
        case NodeKind::IdentList: return "ident-list";
    }
    return "unknown";
}

}  // namespace squill::sql
