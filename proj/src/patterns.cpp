#include "squill/patterns.hpp"

#include <algorithm>
#include <array>
#include <functional>

#include "squill/common.hpp"
#include "squill/errors.hpp"

namespace squill {

namespace {

using sql::Node;
using sql::NodeKind;
using sql::NodePath;

bool subtree_stops_at_subquery(const Node& node) {
    return node.kind == NodeKind::Subquery || node.kind == NodeKind::Exists ||
           node.kind == NodeKind::Select;
}

bool contains_kind(const Node& node, NodeKind kind, bool cross_subqueries) {
    if (node.kind == kind) return true;
    if (!cross_subqueries && subtree_stops_at_subquery(node)) return false;
    for (const Node& c : node.children)
        if (contains_kind(c, kind, cross_subqueries)) return true;
    return false;
}

bool is_comparison_op(const std::string& op) {
    return op == "=" || op == "<>" || op == "<" || op == ">" || op == "<=" || op == ">=";
}

bool is_numeric_literal(const Node& e) {
    if (e.kind == NodeKind::UnaryOp && (e.text == "-" || e.text == "+"))
        return is_numeric_literal(e.children[0]);
    if (e.kind != NodeKind::Literal || e.text.empty()) return false;
    char c = e.text[0];
    return std::isdigit(static_cast<unsigned char>(c)) || c == '.';
}

bool is_strftime_call(const Node& e) {
    return e.kind == NodeKind::FuncCall && iequals(e.text, "STRFTIME");
}

std::string literal_string_value(const Node& lit) {
    // Canonical lexeme is 'text' with doubled quotes.
    const std::string& lex = lit.text;
    if (lex.size() < 2 || lex.front() != '\'' || lex.back() != '\'') return "";
    std::string out;
    for (std::size_t i = 1; i + 1 < lex.size(); ++i) {
        if (lex[i] == '\'' && i + 2 < lex.size() && lex[i + 1] == '\'') ++i;
        out += lex[i];
    }
    return out;
}

constexpr std::array<char, 13> kValidStrftimeSpecifiers = {'d', 'f', 'H', 'j', 'J', 'm', 'M',
                                                           'S', 's', 'w', 'W', 'Y', '%'};

bool valid_strftime_specifier(char c) {
    return std::find(kValidStrftimeSpecifiers.begin(), kValidStrftimeSpecifiers.end(), c) !=
           kValidStrftimeSpecifiers.end();
}

// Returns the first bad specifier in a strftime format, or empty string.
std::string bad_strftime_specifier(const std::string& format) {
    for (std::size_t i = 0; i < format.size(); ++i) {
        if (format[i] != '%') continue;
        if (i + 1 >= format.size()) return "%";
        if (!valid_strftime_specifier(format[i + 1]))
            return std::string("%") + format[i + 1];
        ++i;
    }
    return "";
}

void match_select_star(const Node& root, std::vector<PatternMatch>& out) {
    for (std::size_t i = 0; i < root.children.size(); ++i) {
        const Node& core = root.children[i];
        if (core.kind != NodeKind::SelectCore) continue;
        for (std::size_t j = 0; j < core.children.size(); ++j) {
            const Node& list = core.children[j];
            if (list.kind != NodeKind::SelectList) continue;
            for (std::size_t k = 0; k < list.children.size(); ++k) {
                const Node& item = list.children[k];
                if (item.children.empty() || item.children[0].kind != NodeKind::Star) continue;
                PatternMatch m;
                m.kind = "select-star";
                m.node_path = {static_cast<int>(i), static_cast<int>(j), static_cast<int>(k), 0};
                out.push_back(std::move(m));
            }
        }
    }
}

void match_join_nonstandard(const Node& root, std::vector<PatternMatch>& out) {
    sql::walk(root, [&](const Node& node, const NodePath& path) {
        if (node.kind != NodeKind::On) return true;
        const Node& cond = node.children[0];
        std::string reason;
        std::function<void(const Node&)> scan = [&](const Node& e) {
            if (!reason.empty()) return;
            if (subtree_stops_at_subquery(e)) return;
            if (e.kind == NodeKind::BinaryOp && e.text == "OR") {
                reason = "or-condition";
                return;
            }
            if (e.kind == NodeKind::InExpr) {
                reason = "in-condition";
                return;
            }
            if (e.kind == NodeKind::BinaryOp && is_comparison_op(e.text) && e.text != "=" &&
                e.children[0].kind == NodeKind::ColumnRef &&
                e.children[1].kind == NodeKind::ColumnRef) {
                reason = "non-equality";
                return;
            }
            for (const Node& c : e.children) scan(c);
        };
        scan(cond);
        if (!reason.empty()) {
            PatternMatch m;
            m.kind = "join-nonstandard";
            m.node_path = path;
            m.details["reason"] = reason;
            m.details["condition"] = sql::render_expr(cond);
            out.push_back(std::move(m));
        }
        return true;
    });
}

void match_order_by_aggregate(const Node& root, std::vector<PatternMatch>& out) {
    sql::walk(root, [&](const Node& node, const NodePath& path) {
        if (node.kind != NodeKind::Select) return true;
        const Node* order_by = nullptr;
        int order_idx = -1;
        bool has_limit = false;
        bool has_group_by = false;
        for (std::size_t i = 0; i < node.children.size(); ++i) {
            const Node& child = node.children[i];
            if (child.kind == NodeKind::OrderBy) {
                order_by = &child;
                order_idx = static_cast<int>(i);
            } else if (child.kind == NodeKind::Limit) {
                has_limit = true;
            } else if (child.kind == NodeKind::SelectCore) {
                for (const Node& clause : child.children)
                    if (clause.kind == NodeKind::GroupBy) has_group_by = true;
            }
        }
        if (!order_by || !has_limit || has_group_by) return true;
        for (std::size_t i = 0; i < order_by->children.size(); ++i) {
            const Node& item = order_by->children[i];
            if (!contains_aggregate(item.children[0])) continue;
            PatternMatch m;
            m.kind = "order-by-aggregate-limit";
            m.node_path = path;
            m.node_path.push_back(order_idx);
            m.node_path.push_back(static_cast<int>(i));
            std::function<const Node*(const Node&)> find_agg = [&](const Node& e) -> const Node* {
                if (e.kind == NodeKind::FuncCall && is_aggregate_function(e.text)) return &e;
                if (subtree_stops_at_subquery(e)) return nullptr;
                for (const Node& c : e.children)
                    if (const Node* f = find_agg(c)) return f;
                return nullptr;
            };
            if (const Node* agg = find_agg(item.children[0])) {
                m.details["function"] = to_upper(agg->text);
                m.details["expression"] = sql::render_expr(item.children[0]);
            }
            out.push_back(std::move(m));
        }
        return true;
    });
}

void match_strftime_misuse(const Node& root, std::vector<PatternMatch>& out) {
    sql::walk(root, [&](const Node& node, const NodePath& path) {
        if (is_strftime_call(node) && !node.children.empty() &&
            node.children[0].kind == NodeKind::Literal) {
            std::string format = literal_string_value(node.children[0]);
            std::string bad = bad_strftime_specifier(format);
            if (!bad.empty()) {
                PatternMatch m;
                m.kind = "strftime-misuse";
                m.node_path = path;
                m.details["reason"] = "invalid-format";
                m.details["format"] = format;
                m.details["specifier"] = bad;
                out.push_back(std::move(m));
            }
        }
        if (node.kind == NodeKind::BinaryOp && is_comparison_op(node.text)) {
            const Node& lhs = node.children[0];
            const Node& rhs = node.children[1];
            const Node* call = nullptr;
            const Node* literal = nullptr;
            if (is_strftime_call(lhs) && is_numeric_literal(rhs)) {
                call = &lhs;
                literal = &rhs;
            } else if (is_strftime_call(rhs) && is_numeric_literal(lhs)) {
                call = &rhs;
                literal = &lhs;
            }
            if (call && literal) {
                PatternMatch m;
                m.kind = "strftime-misuse";
                m.node_path = path;
                m.details["reason"] = "numeric-comparison";
                m.details["literal"] = sql::render_expr(*literal);
                m.details["expression"] = sql::render_expr(node);
                out.push_back(std::move(m));
            }
        }
        return true;
    });
}

// Shape: single-table core whose WHERE is exactly
//   <column> op (SELECT MAX|MIN(<column2>) FROM <same table>)
// with an unfiltered subquery.
void match_maxmin_subquery(const Node& root, std::vector<PatternMatch>& out) {
    sql::walk(root, [&](const Node& node, const NodePath& path) {
        if (node.kind != NodeKind::SelectCore) return true;
        const Node* from = nullptr;
        const Node* where = nullptr;
        int where_idx = -1;
        for (std::size_t i = 0; i < node.children.size(); ++i) {
            if (node.children[i].kind == NodeKind::From) from = &node.children[i];
            if (node.children[i].kind == NodeKind::Where) {
                where = &node.children[i];
                where_idx = static_cast<int>(i);
            }
        }
        if (!from || !where) return true;
        if (from->children.size() != 1 || from->children[0].kind != NodeKind::TableRef)
            return true;
        const std::string& outer_table = from->children[0].text;
        const Node& cond = where->children[0];
        if (cond.kind != NodeKind::BinaryOp || !is_comparison_op(cond.text)) return true;
        const Node* col = nullptr;
        const Node* sub = nullptr;
        if (cond.children[0].kind == NodeKind::ColumnRef &&
            cond.children[1].kind == NodeKind::Subquery) {
            col = &cond.children[0];
            sub = &cond.children[1];
        } else if (cond.children[1].kind == NodeKind::ColumnRef &&
                   cond.children[0].kind == NodeKind::Subquery) {
            col = &cond.children[1];
            sub = &cond.children[0];
        }
        if (!col || !sub) return true;
        const Node& select = sub->children[0];
        if (select.children.size() != 1 || select.children[0].kind != NodeKind::SelectCore)
            return true;
        const Node& core = select.children[0];
        const Node* sub_from = nullptr;
        const Node* sub_list = nullptr;
        for (const Node& c : core.children) {
            if (c.kind == NodeKind::From) sub_from = &c;
            if (c.kind == NodeKind::SelectList) sub_list = &c;
            if (c.kind == NodeKind::Where || c.kind == NodeKind::GroupBy ||
                c.kind == NodeKind::Having)
                return true;  // extra predicates: rewrite unsafe
        }
        if (!sub_from || !sub_list || sub_list->children.size() != 1) return true;
        if (sub_from->children.size() != 1 || sub_from->children[0].kind != NodeKind::TableRef)
            return true;
        if (!iequals(sub_from->children[0].text, outer_table)) return true;
        const Node& item = sub_list->children[0];
        if (item.children.empty() || item.children[0].kind != NodeKind::FuncCall) return true;
        const Node& agg = item.children[0];
        bool is_max = iequals(agg.text, "MAX");
        bool is_min = iequals(agg.text, "MIN");
        if (!is_max && !is_min) return true;
        if (agg.children.size() != 1 || agg.children[0].kind != NodeKind::ColumnRef) return true;

        PatternMatch m;
        m.kind = "maxmin-subquery";
        m.node_path = path;
        m.node_path.push_back(where_idx);
        m.node_path.push_back(0);
        m.details["column"] = sql::render_expr(*col);
        m.details["subquery_column"] = sql::render_expr(agg.children[0]);
        m.details["table"] = sub_from->children[0].text;
        m.details["function"] = is_max ? "MAX" : "MIN";
        m.details["direction"] = is_max ? "DESC" : "ASC";
        out.push_back(std::move(m));
        return true;
    });
}

}  // namespace

bool is_aggregate_function(const std::string& name) {
    static const std::array<const char*, 7> kAggregates = {"MAX", "MIN",   "COUNT",       "SUM",
                                                           "AVG", "TOTAL", "GROUP_CONCAT"};
    for (const char* agg : kAggregates)
        if (iequals(name, agg)) return true;
    return false;
}

bool contains_aggregate(const sql::Node& expr) {
    if (expr.kind == NodeKind::FuncCall && is_aggregate_function(expr.text)) return true;
    if (subtree_stops_at_subquery(expr)) return false;
    for (const Node& c : expr.children)
        if (contains_aggregate(c)) return true;
    return false;
}

std::vector<std::string> registered_patterns() {
    return {"select-star", "join-nonstandard", "order-by-aggregate-limit", "strftime-misuse",
            "maxmin-subquery"};
}

std::vector<PatternMatch> find_patterns(const sql::Node& tree, const std::string& kind) {
    std::vector<PatternMatch> out;
    if (kind == "select-star") {
        match_select_star(tree, out);
    } else if (kind == "join-nonstandard") {
        match_join_nonstandard(tree, out);
    } else if (kind == "order-by-aggregate-limit") {
        match_order_by_aggregate(tree, out);
    } else if (kind == "strftime-misuse") {
        match_strftime_misuse(tree, out);
    } else if (kind == "maxmin-subquery") {
        match_maxmin_subquery(tree, out);
    } else {
        throw UnknownPatternError("unknown pattern kind '" + kind + "'");
    }
    return out;
}

}  // namespace squill
