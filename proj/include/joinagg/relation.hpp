#pragma once

#include <joinagg/value.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace joinagg {

/** A bag of fixed-arity rows stored row-major in one flat cell array.  Row order carries no meaning. */
class Relation
{
    public:
    Relation() = default;
    Relation(std::string name, std::vector<std::string> columns);

    const std::string & name() const { return name_; }
    const std::vector<std::string> & columns() const { return columns_; }
    std::size_t arity() const { return columns_.size(); }
    std::size_t size() const { return rows_; }
    bool empty() const { return rows_ == 0; }

    std::span<const Value> row(std::size_t i) const { return {cells_.data() + i * arity(), arity()}; }
    const Value & at(std::size_t row, std::size_t col) const { return cells_[row * arity() + col]; }
    const std::vector<Value> & cells() const { return cells_; }

    void add_row(std::span<const Value> values);
    void reserve(std::size_t rows) { cells_.reserve(rows * arity()); }

    /// Index of the named column; throws QueryError naming the column if absent.
    std::size_t column_index(std::string_view column) const;
    std::optional<std::size_t> find_column(std::string_view column) const;

    /// Sorts rows lexicographically (stable).
    void sort_rows();

    private:
    std::string name_;
    std::vector<std::string> columns_;
    std::vector<Value> cells_;
    std::size_t rows_ = 0;
};

/** Distinct rows of a bag projection, each with its positive duplicate count. */
struct CountedRelation
{
    Relation rows;
    std::vector<uint64_t> multiplicity;

    uint64_t total() const;
};

using RelationPtr = std::shared_ptr<const Relation>;
/// Loaded relations keyed by query alias.  Several aliases may share one relation.
using RelationMap = std::map<std::string, RelationPtr>;

/// Reads a comma separated file.  Columns are `c0..c(k-1)` unless `header` is set.  A column is typed integer iff all of
/// its fields are integral.  Ragged rows, empty fields and empty relations raise IoError.
Relation load_csv(const std::filesystem::path &path, std::string name, bool header = true);
Relation parse_csv(std::istream &in, std::string name, bool header = true, std::string_view origin = "<input>");
void write_csv(std::ostream &out, const Relation &r, bool header = true);

/// Bag projection onto `attrs` (duplicates kept, row count unchanged).
Relation project_bag(const Relation &r, std::span<const std::string> attrs);

/// Distinct rows of the bag projection onto `attrs` with their counts, sorted by row values.
CountedRelation preaggregate(const Relation &r, std::span<const std::string> attrs);

/// Inverse of preaggregate: repeats every row by its multiplicity.
Relation expand(const CountedRelation &c);


/** Open-addressing hash index assigning dense ids to distinct keys of a fixed arity. */
class KeyIndex
{
    public:
    explicit KeyIndex(std::size_t arity, std::size_t expected = 16);

    /// Returns the id of `key`, inserting it when new; `second` tells whether it was inserted.
    std::pair<uint32_t, bool> insert(std::span<const Value> key);
    std::optional<uint32_t> find(std::span<const Value> key) const;

    std::size_t size() const { return count_; }
    std::size_t arity() const { return arity_; }
    std::span<const Value> key(uint32_t id) const { return {keys_.data() + id * arity_, arity_}; }

    private:
    void grow();

    std::size_t arity_;
    std::size_t count_ = 0;
    std::vector<Value> keys_;
    std::vector<std::size_t> hashes_;
    std::vector<uint32_t> slots_; ///< id + 1, 0 marks an empty slot
};

}
