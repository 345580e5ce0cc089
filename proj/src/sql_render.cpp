#include "sql_lexer.hpp"
#include "squill/sql.hpp"

namespace squill::sql {

namespace {

// Binding strength, matching the parser's climb order. Higher binds tighter.
int expr_level(const Node& e) {
    switch (e.kind) {
        case NodeKind::BinaryOp: {
            const std::string& op = e.text;
            if (op == "OR") return 1;
            if (op == "AND") return 2;
            if (op == "<" || op == "<=" || op == ">" || op == ">=") return 5;
            if (op == "&" || op == "|" || op == "<<" || op == ">>") return 6;
            if (op == "+" || op == "-") return 7;
            if (op == "*" || op == "/" || op == "%") return 8;
            if (op == "||") return 9;
            return 4;  // comparisons, IS, LIKE family
        }
        case NodeKind::UnaryOp:
            if (e.text == "NOT") return 3;
            if (e.text == "ISNULL" || e.text == "NOTNULL") return 4;
            return 11;
        case NodeKind::Between:
        case NodeKind::InExpr:
            return 4;
        case NodeKind::Collate:
            return 10;
        default:
            return 12;
    }
}

class Renderer {
public:
    std::string statement(const Node& stmt) {
        std::string out;
        std::size_t i = 0;
        if (i < stmt.children.size() && stmt.children[i].kind == NodeKind::With) {
            out += with_clause(stmt.children[i]);
            out += ' ';
            ++i;
        }
        bool first_core = true;
        for (; i < stmt.children.size(); ++i) {
            const Node& child = stmt.children[i];
            switch (child.kind) {
                case NodeKind::SelectCore:
                    if (!first_core) out += ' ';
                    out += select_core(child);
                    first_core = false;
                    break;
                case NodeKind::CompoundOp:
                    out += ' ';
                    out += child.text;
                    break;
                case NodeKind::OrderBy:
                    out += ' ';
                    out += order_by(child);
                    break;
                case NodeKind::Limit:
                    out += ' ';
                    out += limit(child);
                    break;
                default:
                    break;
            }
        }
        return out;
    }

    std::string expr(const Node& e, int min_level = 1) {
        std::string body = expr_body(e);
        if (expr_level(e) < min_level) return "(" + body + ")";
        return body;
    }

private:
    std::string with_clause(const Node& with) {
        std::string out = "WITH ";
        if (with.text == "RECURSIVE") out += "RECURSIVE ";
        for (std::size_t i = 0; i < with.children.size(); ++i) {
            if (i) out += ", ";
            const Node& cte = with.children[i];
            out += quote_identifier(cte.text);
            std::size_t child = 0;
            if (child < cte.children.size() && cte.children[child].kind == NodeKind::IdentList) {
                out += '(';
                const Node& cols = cte.children[child];
                for (std::size_t j = 0; j < cols.children.size(); ++j) {
                    if (j) out += ", ";
                    out += quote_identifier(cols.children[j].text);
                }
                out += ')';
                ++child;
            }
            out += " AS (";
            out += statement(cte.children[child]);
            out += ')';
        }
        return out;
    }

    std::string select_core(const Node& core) {
        std::string out = "SELECT";
        if (!core.text.empty()) {
            out += ' ';
            out += core.text;
        }
        for (const Node& clause : core.children) {
            switch (clause.kind) {
                case NodeKind::SelectList: {
                    for (std::size_t i = 0; i < clause.children.size(); ++i) {
                        out += i ? ", " : " ";
                        out += select_item(clause.children[i]);
                    }
                    break;
                }
                case NodeKind::From:
                    out += ' ';
                    out += from_clause(clause);
                    break;
                case NodeKind::Where:
                    out += " WHERE ";
                    out += expr(clause.children[0]);
                    break;
                case NodeKind::GroupBy: {
                    out += " GROUP BY ";
                    for (std::size_t i = 0; i < clause.children.size(); ++i) {
                        if (i) out += ", ";
                        out += expr(clause.children[i]);
                    }
                    break;
                }
                case NodeKind::Having:
                    out += " HAVING ";
                    out += expr(clause.children[0]);
                    break;
                default:
                    break;
            }
        }
        return out;
    }

    std::string select_item(const Node& item) {
        const Node& payload = item.children[0];
        std::string out;
        if (payload.kind == NodeKind::Star) {
            out = "*";
        } else if (payload.kind == NodeKind::TableStar) {
            out = quote_identifier(payload.text) + ".*";
        } else {
            out = expr(payload);
        }
        if (!item.text.empty()) out += " AS " + quote_identifier(item.text);
        return out;
    }

    std::string from_clause(const Node& from) {
        std::string out = "FROM ";
        out += table_source(from.children[0]);
        for (std::size_t i = 1; i < from.children.size(); ++i) {
            const Node& join = from.children[i];
            if (join.text == ",") {
                out += ", ";
            } else {
                out += ' ';
                out += join.text;
                out += ' ';
            }
            out += table_source(join.children[0]);
            if (join.children.size() > 1) {
                const Node& constraint = join.children[1];
                if (constraint.kind == NodeKind::On) {
                    out += " ON ";
                    out += expr(constraint.children[0]);
                } else if (constraint.kind == NodeKind::Using) {
                    out += " USING (";
                    for (std::size_t j = 0; j < constraint.children.size(); ++j) {
                        if (j) out += ", ";
                        out += quote_identifier(constraint.children[j].text);
                    }
                    out += ')';
                }
            }
        }
        return out;
    }

    std::string table_source(const Node& source) {
        std::string out;
        const Node* alias = nullptr;
        if (source.kind == NodeKind::TableRef) {
            out = quote_identifier(source.text);
            if (!source.children.empty()) alias = &source.children[0];
        } else {
            out = "(" + statement(source.children[0]) + ")";
            if (source.children.size() > 1) alias = &source.children[1];
        }
        if (alias) out += " AS " + quote_identifier(alias->text);
        return out;
    }

    std::string order_by(const Node& ob) {
        std::string out = "ORDER BY ";
        for (std::size_t i = 0; i < ob.children.size(); ++i) {
            if (i) out += ", ";
            const Node& item = ob.children[i];
            out += expr(item.children[0]);
            if (!item.text.empty()) {
                out += ' ';
                out += item.text;
            }
        }
        return out;
    }

    std::string limit(const Node& node) {
        std::string out = "LIMIT " + expr(node.children[0]);
        if (node.children.size() > 1) out += " OFFSET " + expr(node.children[1]);
        return out;
    }

    std::string expr_body(const Node& e) {
        switch (e.kind) {
            case NodeKind::Literal:
                return e.text;
            case NodeKind::ColumnRef:
                if (e.children.empty()) return quote_identifier(e.text);
                return quote_identifier(e.children[0].text) + "." + quote_identifier(e.text);
            case NodeKind::FuncCall: {
                std::string out = e.text + "(";
                if (e.flag) out += "DISTINCT ";
                for (std::size_t i = 0; i < e.children.size(); ++i) {
                    if (i) out += ", ";
                    out += e.children[i].kind == NodeKind::Star ? "*" : expr(e.children[i]);
                }
                out += ')';
                return out;
            }
            case NodeKind::BinaryOp: {
                int level = expr_level(e);
                std::string out = expr(e.children[0], level);
                out += ' ';
                out += e.text;
                out += ' ';
                out += expr(e.children[1], level + 1);
                if (e.children.size() > 2) out += " ESCAPE " + expr(e.children[2], 5);
                return out;
            }
            case NodeKind::UnaryOp: {
                if (e.text == "ISNULL") return expr(e.children[0], 4) + " IS NULL";
                if (e.text == "NOTNULL") return expr(e.children[0], 4) + " IS NOT NULL";
                if (e.text == "NOT") return "NOT " + expr(e.children[0], 3);
                return e.text + expr(e.children[0], 11);
            }
            case NodeKind::Between: {
                std::string out = expr(e.children[0], 4);
                if (e.text == "NOT") out += " NOT";
                out += " BETWEEN " + expr(e.children[1], 5) + " AND " + expr(e.children[2], 5);
                return out;
            }
            case NodeKind::InExpr: {
                std::string out = expr(e.children[0], 4);
                if (e.text == "NOT") out += " NOT";
                out += " IN (";
                const Node& rhs = e.children[1];
                if (rhs.kind == NodeKind::ExprList) {
                    for (std::size_t i = 0; i < rhs.children.size(); ++i) {
                        if (i) out += ", ";
                        out += expr(rhs.children[i]);
                    }
                } else {
                    out += statement(rhs);
                }
                out += ')';
                return out;
            }
            case NodeKind::Case: {
                std::string out = "CASE";
                for (const Node& part : e.children) {
                    switch (part.kind) {
                        case NodeKind::CaseBase:
                            out += ' ' + expr(part.children[0]);
                            break;
                        case NodeKind::CaseWhen:
                            out += " WHEN " + expr(part.children[0]) + " THEN " +
                                   expr(part.children[1]);
                            break;
                        case NodeKind::CaseElse:
                            out += " ELSE " + expr(part.children[0]);
                            break;
                        default:
                            break;
                    }
                }
                out += " END";
                return out;
            }
            case NodeKind::Cast:
                return "CAST(" + expr(e.children[0]) + " AS " + e.text + ")";
            case NodeKind::Exists:
                return std::string(e.text == "NOT" ? "NOT " : "") + "EXISTS (" +
                       statement(e.children[0]) + ")";
            case NodeKind::Subquery:
                return "(" + statement(e.children[0]) + ")";
            case NodeKind::Collate:
                return expr(e.children[0], 10) + " COLLATE " + e.text;
            default:
                return "";
        }
    }
};

}  // namespace

bool needs_quoting(const std::string& name) {
    if (name.empty()) return true;
    if (!std::isalpha(static_cast<unsigned char>(name[0])) && name[0] != '_') return true;
    for (char c : name) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return true;
    }
    return is_keyword(to_upper(name));
}

std::string quote_identifier(const std::string& name) {
    if (!needs_quoting(name)) return name;
    std::string out = "\"";
    for (char c : name) {
        out += c;
        if (c == '"') out += '"';
    }
    out += '"';
    return out;
}

std::string render_sql(const Node& tree) {
    Renderer renderer;
    return renderer.statement(tree);
}

std::string render_expr(const Node& expr) {
    Renderer renderer;
    return renderer.expr(expr);
}

}  // namespace squill::sql
