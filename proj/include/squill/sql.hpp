#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "squill/errors.hpp"

namespace squill::sql {

// One node kind per grammar construct. Trees are plain values: immutable by
// convention after parse, structurally comparable, and addressable by child
// index paths.
enum class NodeKind : std::uint8_t {
    Select,       // [With] SelectCore (CompoundOp SelectCore)* [OrderBy] [Limit]
    With,         // text: "RECURSIVE" or ""; children: Cte+
    Cte,          // text: name; children: [IdentList] Select
    CompoundOp,   // text: "UNION" | "UNION ALL" | "INTERSECT" | "EXCEPT"
    SelectCore,   // text: "DISTINCT" | "ALL" | ""; children: SelectList [From] [Where] [GroupBy] [Having]
    SelectList,   // children: SelectItem+
    SelectItem,   // text: alias or ""; children: one of expr | Star | TableStar
    Star,         // leaf
    TableStar,    // text: table-or-alias name
    From,         // children: first table source, then Join*
    Join,         // text: join spec ("JOIN", "LEFT JOIN", ",", ...); children: source [On|Using]
    TableRef,     // text: table name; children: [Alias]
    SubqueryRef,  // children: Select [Alias]   (derived table)
    Alias,        // text: alias name
    On,           // children: expr
    Using,        // children: Identifier+
    Where,        // children: expr
    GroupBy,      // children: expr+
    Having,       // children: expr
    OrderBy,      // children: OrderItem+
    OrderItem,    // text: "" | "ASC" | "DESC" (+ " NULLS FIRST"/" NULLS LAST"); children: expr
    Limit,        // children: limit-expr [offset-expr]
    ColumnRef,    // text: column name; children: [Identifier qualifier]
    Identifier,   // text: name
    Literal,      // text: canonical lexeme ('abc', 42, 1.5, NULL, TRUE, X'AB', CURRENT_DATE)
    FuncCall,     // text: function name; flag 1 = DISTINCT; children: args (Star for f(*))
    BinaryOp,     // text: operator; children: lhs rhs [escape-expr for LIKE family]
    UnaryOp,      // text: "-" "+" "~" "NOT" "ISNULL" "NOTNULL"; children: operand
    Between,      // text: "" | "NOT"; children: expr lo hi
    InExpr,       // text: "" | "NOT"; children: expr (ExprList | Select)
    ExprList,     // children: expr*
    Case,         // children: [CaseBase] CaseWhen+ [CaseElse]
    CaseBase,     // children: expr
    CaseWhen,     // children: when-expr then-expr
    CaseElse,     // children: expr
    Cast,         // text: type name; children: expr
    Exists,       // text: "" | "NOT"; children: Select
    Subquery,     // children: Select   (scalar subquery expression)
    Collate,      // text: collation name; children: expr
    IdentList,    // children: Identifier+
};

struct Node {
    NodeKind kind{NodeKind::Select};
    std::string text;
    std::uint8_t flag = 0;
    std::vector<Node> children;

    bool operator==(const Node&) const = default;
};

using NodePath = std::vector<int>;

// Parses one SQLite-dialect SELECT statement (compound selects and CTEs
// included). Throws ParseError for anything else.
Node parse_sql(const std::string& text);

// Canonical single-line rendering; parse_sql(render_sql(t)) == t.
std::string render_sql(const Node& tree);

// Renders a single expression subtree (used for directives and reports).
std::string render_expr(const Node& expr);

const char* node_kind_name(NodeKind kind);

// Returns the node at `path`, or nullptr if the path does not address one.
const Node* node_at(const Node& root, const NodePath& path);

// Preorder walk; visitor returns false to skip the node's subtree.
template <typename F>
void walk(const Node& node, NodePath& path, F&& visit) {
    if (!visit(node, path)) return;
    for (int i = 0; i < static_cast<int>(node.children.size()); ++i) {
        path.push_back(i);
        walk(node.children[static_cast<std::size_t>(i)], path, visit);
        path.pop_back();
    }
}

template <typename F>
void walk(const Node& root, F&& visit) {
    NodePath path;
    walk(root, path, visit);
}

// An identifier needs quoting when it is not a plain word or collides with a
// keyword; rendered with double quotes.
bool needs_quoting(const std::string& name);
std::string quote_identifier(const std::string& name);

}  // namespace squill::sql
