#include "squill/schema_refs.hpp"

namespace squill {

namespace {

using sql::Node;
using sql::NodeKind;
using sql::NodePath;

// One relation visible in a FROM scope: either a catalog table or a derived
// relation (subquery alias, CTE) that cannot resolve to the catalog.
struct ScopeEntry {
    std::string key;      // alias if present, else the table name
    std::string table;    // canonical catalog name; empty for derived relations
};

using Scope = std::vector<ScopeEntry>;

class Resolver {
public:
    explicit Resolver(const SchemaCatalog& catalog) : catalog_(catalog) {}

    ResolvedRefs run(const Node& root) {
        NodePath path;
        std::vector<Scope> scopes;
        std::vector<std::string> ctes;
        process_select(root, path, scopes, ctes);
        return std::move(out_);
    }

private:
    const SchemaCatalog& catalog_;
    ResolvedRefs out_;

    void report(const std::string& name) { out_.unresolved.push_back(name); }

    void process_select(const Node& select, NodePath& path, std::vector<Scope>& outer,
                        std::vector<std::string> visible_ctes) {
        std::size_t idx = 0;
        if (idx < select.children.size() && select.children[idx].kind == NodeKind::With) {
            const Node& with = select.children[idx];
            for (const Node& cte : with.children) visible_ctes.push_back(cte.text);
            path.push_back(static_cast<int>(idx));
            for (std::size_t c = 0; c < with.children.size(); ++c) {
                const Node& cte = with.children[c];
                std::size_t body = cte.children.size() - 1;
                path.push_back(static_cast<int>(c));
                path.push_back(static_cast<int>(body));
                process_select(cte.children[body], path, outer, visible_ctes);
                path.pop_back();
                path.pop_back();
            }
            path.pop_back();
            ++idx;
        }
        Scope first_core_scope;
        bool have_first = false;
        for (std::size_t i = idx; i < select.children.size(); ++i) {
            const Node& child = select.children[i];
            path.push_back(static_cast<int>(i));
            if (child.kind == NodeKind::SelectCore) {
                Scope scope = process_core(child, path, outer, visible_ctes);
                if (!have_first) {
                    first_core_scope = scope;
                    have_first = true;
                }
            } else if (child.kind == NodeKind::OrderBy || child.kind == NodeKind::Limit) {
                outer.push_back(first_core_scope);
                resolve_exprs(child, path, outer, visible_ctes);
                outer.pop_back();
            }
            path.pop_back();
        }
    }

    Scope process_core(const Node& core, NodePath& path, std::vector<Scope>& outer,
                       const std::vector<std::string>& ctes) {
        Scope scope;
        const Node* from = nullptr;
        std::size_t from_idx = 0;
        for (std::size_t i = 0; i < core.children.size(); ++i) {
            if (core.children[i].kind == NodeKind::From) {
                from = &core.children[i];
                from_idx = i;
                break;
            }
        }
        if (from) {
            path.push_back(static_cast<int>(from_idx));
            for (std::size_t i = 0; i < from->children.size(); ++i) {
                const Node& item = from->children[i];
                path.push_back(static_cast<int>(i));
                if (item.kind == NodeKind::Join) {
                    path.push_back(0);
                    add_source(item.children[0], path, scope, outer, ctes);
                    path.pop_back();
                } else {
                    add_source(item, path, scope, outer, ctes);
                }
                path.pop_back();
            }
            path.pop_back();
        }
        // Resolve everything in the core (including join constraints) with
        // the full core scope plus any outer scopes.
        outer.push_back(scope);
        for (std::size_t i = 0; i < core.children.size(); ++i) {
            const Node& clause = core.children[i];
            path.push_back(static_cast<int>(i));
            if (clause.kind == NodeKind::From) {
                for (std::size_t j = 0; j < clause.children.size(); ++j) {
                    const Node& item = clause.children[j];
                    if (item.kind != NodeKind::Join || item.children.size() < 2) continue;
                    path.push_back(static_cast<int>(j));
                    path.push_back(1);
                    resolve_exprs(item.children[1], path, outer, ctes);
                    path.pop_back();
                    path.pop_back();
                }
            } else {
                resolve_exprs(clause, path, outer, ctes);
            }
            path.pop_back();
        }
        Scope result = outer.back();
        outer.pop_back();
        return result;
    }

    void add_source(const Node& source, NodePath& path, Scope& scope, std::vector<Scope>& outer,
                    const std::vector<std::string>& ctes) {
        if (source.kind == NodeKind::TableRef) {
            std::string key = source.text;
            if (!source.children.empty() && source.children[0].kind == NodeKind::Alias)
                key = source.children[0].text;
            bool is_cte = false;
            for (const auto& name : ctes) {
                if (iequals(name, source.text)) {
                    is_cte = true;
                    break;
                }
            }
            if (!is_cte) {
                if (auto canonical = catalog_.canonical_table(source.text)) {
                    out_.subset.add_table(*canonical);
                    scope.push_back({key, *canonical});
                    return;
                }
                report(source.text);
            }
            scope.push_back({key, ""});
        } else if (source.kind == NodeKind::SubqueryRef) {
            // Derived tables do not see sibling FROM entries.
            path.push_back(0);
            process_select(source.children[0], path, outer, ctes);
            path.pop_back();
            std::string key;
            if (source.children.size() > 1 && source.children[1].kind == NodeKind::Alias)
                key = source.children[1].text;
            scope.push_back({key, ""});
        }
    }

    // Walks expression trees resolving column references; descends into
    // subqueries with the current scope chain (correlated references work).
    void resolve_exprs(const Node& node, NodePath& path, std::vector<Scope>& scopes,
                       const std::vector<std::string>& ctes) {
        switch (node.kind) {
            case NodeKind::ColumnRef:
                resolve_column(node, path, scopes);
                return;
            case NodeKind::Select:
                process_select(node, path, scopes, ctes);
                return;
            case NodeKind::Using:
                for (std::size_t i = 0; i < node.children.size(); ++i) {
                    path.push_back(static_cast<int>(i));
                    resolve_unqualified(node.children[i].text, path, scopes);
                    path.pop_back();
                }
                return;
            default:
                break;
        }
        for (std::size_t i = 0; i < node.children.size(); ++i) {
            path.push_back(static_cast<int>(i));
            resolve_exprs(node.children[i], path, scopes, ctes);
            path.pop_back();
        }
    }

    void resolve_column(const Node& ref, const NodePath& path,
                        const std::vector<Scope>& scopes) {
        const std::string& column = ref.text;
        if (!ref.children.empty()) {
            const std::string& qualifier = ref.children[0].text;
            for (auto it = scopes.rbegin(); it != scopes.rend(); ++it) {
                for (const auto& entry : *it) {
                    if (!iequals(entry.key, qualifier)) continue;
                    if (entry.table.empty()) {
                        report(qualifier + "." + column);
                        return;
                    }
                    if (auto id = catalog_.canonical_column(entry.table, column)) {
                        record(*id, path);
                    } else {
                        report(entry.table + "." + column);
                    }
                    return;
                }
            }
            report(qualifier + "." + column);
            return;
        }
        resolve_unqualified(column, path, scopes);
    }

    // Innermost scope first, first FROM entry that has the column wins.
    void resolve_unqualified(const std::string& column, const NodePath& path,
                             const std::vector<Scope>& scopes) {
        for (auto it = scopes.rbegin(); it != scopes.rend(); ++it) {
            for (const auto& entry : *it) {
                if (entry.table.empty()) continue;
                if (auto id = catalog_.canonical_column(entry.table, column)) {
                    record(*id, path);
                    return;
                }
            }
        }
        report(column);
    }

    void record(const ColumnId& id, const NodePath& path) {
        out_.subset.add_column(id);
        out_.column_refs[path] = id;
    }
};

}  // namespace

ResolvedRefs resolve_refs(const sql::Node& tree, const SchemaCatalog& catalog) {
    Resolver resolver(catalog);
    return resolver.run(tree);
}

SchemaSubset extract_schema_refs(const sql::Node& tree, const SchemaCatalog& catalog,
                                 std::vector<std::string>* unresolved) {
    ResolvedRefs refs = resolve_refs(tree, catalog);
    if (unresolved) *unresolved = refs.unresolved;
    return refs.subset;
}

}  // namespace squill
