#include <joinagg/sql_parser.hpp>

#include <joinagg/errors.hpp>
#include <joinagg/query_model.hpp>

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>


namespace joinagg {

namespace {

enum class Tok { kIdent, kNumber, kString, kSymbol, kEnd };

struct Token
{
    Tok kind;
    std::string text;
    std::size_t pos;
};

std::string upper(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::toupper(c); });
    return out;
}

std::vector<Token> tokenize(std::string_view s)
{
    std::vector<Token> toks;
    std::size_t i = 0;
    auto error = [&](std::size_t pos, const std::string &msg) {
        throw QueryError("syntax error at offset " + std::to_string(pos) + ": " + msg);
    };
    while (i < s.size()) {
        unsigned char c = s[i];
        if (std::isspace(c)) { ++i; continue; }
        if (c == '-' and i + 1 < s.size() and s[i + 1] == '-') {
            while (i < s.size() and s[i] != '\n') ++i;
            continue;
        }
        const std::size_t start = i;
        if (std::isalpha(c) or c == '_') {
            while (i < s.size() and (std::isalnum(static_cast<unsigned char>(s[i])) or s[i] == '_')) ++i;
            toks.push_back({Tok::kIdent, std::string(s.substr(start, i - start)), start});
        } else if (std::isdigit(c)) {
            while (i < s.size() and (std::isalnum(static_cast<unsigned char>(s[i])) or s[i] == '.')) ++i;
            toks.push_back({Tok::kNumber, std::string(s.substr(start, i - start)), start});
        } else if (c == '\'') {
            ++i;
            while (i < s.size() and s[i] != '\'') ++i;
            if (i == s.size())
                error(start, "unterminated string literal");
            ++i;
            toks.push_back({Tok::kString, std::string(s.substr(start, i - start)), start});
        } else if (c == '<' or c == '>' or c == '!') {
            ++i;
            if (i < s.size() and (s[i] == '=' or s[i] == '>')) ++i;
            toks.push_back({Tok::kSymbol, std::string(s.substr(start, i - start)), start});
        } else if (std::string_view(",.()*=;+-/").find(c) != std::string_view::npos) {
            ++i;
            toks.push_back({Tok::kSymbol, std::string(1, c), start});
        } else {
            error(start, std::string("unexpected character '") + static_cast<char>(c) + "'");
        }
    }
    toks.push_back({Tok::kEnd, "", s.size()});
    return toks;
}

const std::set<std::string> kReserved = {
    "SELECT", "FROM", "WHERE", "GROUP", "BY", "AND", "OR", "AS", "NOT", "HAVING", "ORDER", "JOIN", "ON",
};

/// A column reference whose alias may still be unresolved.
struct ColumnName
{
    std::optional<std::string> alias;
    std::string column;
    std::size_t pos;
};

class Parser
{
    public:
    explicit Parser(std::string_view text) : toks_(tokenize(text)) { }

    struct Parsed
    {
        std::vector<ColumnName> select_columns;
        std::optional<std::pair<AggregateKind, std::optional<ColumnName>>> aggregate;
        std::vector<RelationRef> relations;
        std::vector<std::pair<ColumnName, ColumnName>> joins;
        std::vector<ColumnName> group_by;
    };

    Parsed parse()
    {
        Parsed p;
        expect_keyword("SELECT");
        do {
            parse_select_item(p);
        } while (accept_symbol(","));

        expect_keyword("FROM");
        do {
            p.relations.push_back(parse_relation());
        } while (accept_symbol(","));

        if (accept_keyword("WHERE")) {
            do {
                p.joins.push_back(parse_predicate());
            } while (accept_keyword("AND"));
            if (is_keyword("OR"))
                fail("disjunctive predicates (OR) are not supported; only conjunctive equijoins");
        }

        expect_keyword("GROUP");
        expect_keyword("BY");
        do {
            p.group_by.push_back(parse_column());
        } while (accept_symbol(","));

        accept_symbol(";");
        if (peek().kind != Tok::kEnd) {
            if (is_keyword("HAVING"))
                fail("HAVING is not supported");
            fail("unexpected '" + peek().text + "' after GROUP BY list");
        }
        if (not p.aggregate)
            throw QueryError("the SELECT list must contain exactly one aggregate");
        return p;
    }

    private:
    const Token & peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
    const Token & next() { const Token &t = peek(); if (pos_ < toks_.size() - 1) ++pos_; return t; }

    [[noreturn]] void fail(const std::string &msg) const
    {
        throw QueryError("syntax error at offset " + std::to_string(peek().pos) + ": " + msg);
    }

    bool is_keyword(std::string_view kw, std::size_t ahead = 0) const
    {
        return peek(ahead).kind == Tok::kIdent and upper(peek(ahead).text) == kw;
    }
    bool accept_keyword(std::string_view kw) { if (is_keyword(kw)) { next(); return true; } return false; }
    void expect_keyword(std::string_view kw)
    {
        if (not accept_keyword(kw))
            fail("expected " + std::string(kw) + (peek().kind == Tok::kEnd ? " before end of input"
                                                                         : ", found '" + peek().text + "'"));
    }
    bool is_symbol(std::string_view s) const { return peek().kind == Tok::kSymbol and peek().text == s; }
    bool accept_symbol(std::string_view s) { if (is_symbol(s)) { next(); return true; } return false; }
    void expect_symbol(std::string_view s)
    {
        if (not accept_symbol(s))
            fail("expected '" + std::string(s) + "'" + (peek().kind == Tok::kEnd ? " before end of input"
                                                                              : ", found '" + peek().text + "'"));
    }

    std::string parse_identifier(std::string_view what)
    {
        if (peek().kind != Tok::kIdent or kReserved.contains(upper(peek().text)))
            fail("expected " + std::string(what) + (peek().kind == Tok::kEnd ? " before end of input"
                                                                           : ", found '" + peek().text + "'"));
        return next().text;
    }

    ColumnName parse_column()
    {
        const std::size_t pos = peek().pos;
        auto first = parse_identifier("column");
        if (accept_symbol(".")) {
            auto col = parse_identifier("column name");
            return {first, col, pos};
        }
        return {std::nullopt, first, pos};
    }

    static std::optional<AggregateKind> aggregate_kind(std::string_view name)
    {
        auto u = upper(name);
        if (u == "COUNT") return AggregateKind::kCountStar;
        if (u == "SUM") return AggregateKind::kSum;
        if (u == "MIN") return AggregateKind::kMin;
        if (u == "MAX") return AggregateKind::kMax;
        if (u == "AVG") return AggregateKind::kAvg;
        return std::nullopt;
    }

    void parse_select_item(Parsed &p)
    {
        if (peek().kind == Tok::kIdent and peek(1).kind == Tok::kSymbol and peek(1).text == "(") {
            auto kind = aggregate_kind(peek().text);
            if (not kind)
                fail("unsupported function '" + peek().text + "'");
            if (p.aggregate)
                fail("multiple aggregates are not supported");
            next();
            expect_symbol("(");
            std::optional<ColumnName> arg;
            if (*kind == AggregateKind::kCountStar) {
                if (not accept_symbol("*"))
                    fail("only COUNT(*) is supported");
            } else {
                if (is_keyword("DISTINCT"))
                    fail("DISTINCT aggregates are not supported");
                arg = parse_column();
            }
            expect_symbol(")");
            p.aggregate.emplace(*kind, arg);
            return;
        }
        if (is_symbol("*"))
            fail("SELECT * is not supported");
        p.select_columns.push_back(parse_column());
    }

    RelationRef parse_relation()
    {
        auto source = parse_identifier("relation name");
        std::string alias = source;
        if (accept_keyword("AS"))
            alias = parse_identifier("alias");
        else if (peek().kind == Tok::kIdent and not kReserved.contains(upper(peek().text)))
            alias = next().text;
        return {source, alias};
    }

    ColumnName parse_operand()
    {
        if (peek().kind == Tok::kNumber or peek().kind == Tok::kString)
            fail("selection predicates on constants are not supported; only attribute equijoins");
        if (peek().kind == Tok::kIdent and peek(1).kind == Tok::kSymbol and peek(1).text == "(")
            fail("function calls are not supported in WHERE");
        return parse_column();
    }

    std::pair<ColumnName, ColumnName> parse_predicate()
    {
        if (is_keyword("NOT"))
            fail("negated predicates are not supported");
        auto lhs = parse_operand();
        if (peek().kind == Tok::kSymbol and (peek().text == "<" or peek().text == ">" or peek().text == "<=" or
                                             peek().text == ">=" or peek().text == "<>" or peek().text == "!=")) {
            fail("non-equality predicate '" + peek().text + "' is not supported; only equijoins");
        }
        expect_symbol("=");
        auto rhs = parse_operand();
        if (peek().kind == Tok::kSymbol and (peek().text == "+" or peek().text == "-" or peek().text == "*" or
                                             peek().text == "/"))
            fail("expressions are not supported in WHERE");
        return {lhs, rhs};
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

AttributeRef resolve_column(const ColumnName &c, const std::vector<RelationRef> &relations, const Catalog *catalog)
{
    if (c.alias) {
        auto it = std::find_if(relations.begin(), relations.end(), [&](const auto &r) { return r.alias == *c.alias; });
        if (it == relations.end())
            throw QueryError("unknown alias '" + *c.alias + "' in " + *c.alias + "." + c.column);
        if (catalog) {
            auto cat = catalog->find(it->source);
            if (cat == catalog->end())
                cat = catalog->find(it->alias);
            if (cat != catalog->end() and std::find(cat->second.begin(), cat->second.end(), c.column) == cat->second.end())
                throw QueryError("unknown column '" + c.column + "' in relation " + it->source + " (alias " +
                                 it->alias + ")");
        }
        return {*c.alias, c.column};
    }
    if (relations.size() == 1 and not catalog)
        return {relations.front().alias, c.column};
    if (not catalog)
        throw QueryError("unqualified column '" + c.column + "' cannot be resolved without a catalog");
    std::vector<const RelationRef*> owners;
    for (const auto &r : relations) {
        auto cat = catalog->find(r.source);
        if (cat == catalog->end())
            cat = catalog->find(r.alias);
        if (cat != catalog->end() and std::find(cat->second.begin(), cat->second.end(), c.column) != cat->second.end())
            owners.push_back(&r);
    }
    if (owners.empty())
        throw QueryError("unknown column '" + c.column + "'");
    if (owners.size() > 1)
        throw QueryError("ambiguous column '" + c.column + "'");
    return {owners.front()->alias, c.column};
}

}

QuerySpec parse_sql(std::string_view text, const Catalog *catalog)
{
    auto parsed = Parser(text).parse();

    QuerySpec q;
    std::set<std::string> aliases;
    for (const auto &r : parsed.relations) {
        if (not aliases.insert(r.alias).second)
            throw QueryError("duplicate alias '" + r.alias + "'");
    }
    q.relations = std::move(parsed.relations);

    for (const auto &[l, r] : parsed.joins)
        q.joins.push_back({resolve_column(l, q.relations, catalog), resolve_column(r, q.relations, catalog)});
    for (const auto &g : parsed.group_by)
        q.group_by.push_back(resolve_column(g, q.relations, catalog));

    std::set<AttributeRef> grouped(q.group_by.begin(), q.group_by.end());
    if (grouped.size() != q.group_by.size())
        throw QueryError("duplicate column in GROUP BY");
    std::set<AttributeRef> selected;
    for (const auto &c : parsed.select_columns)
        selected.insert(resolve_column(c, q.relations, catalog));
    if (selected != grouped)
        throw QueryError("SELECT columns must equal the GROUP BY columns");

    auto &[kind, arg] = *parsed.aggregate;
    q.aggregate.kind = kind;
    if (arg)
        q.aggregate.attribute = resolve_column(*arg, q.relations, catalog);

    validate_query(q);
    return q;
}

QuerySpec parse_query(std::string_view text, const Catalog *catalog)
{
    auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string_view::npos and text[first] == '{') {
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception &e) {
            throw QueryError(std::string("malformed query document: ") + e.what());
        }
        auto q = query_from_json(doc);
        validate_query(q);
        return q;
    }
    return parse_sql(text, catalog);
}

}
