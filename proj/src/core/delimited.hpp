#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nowcast {

/// A header-first delimiter-separated text table. Lines starting with '#'
/// and blank lines are skipped; fields are trimmed. The delimiter is a comma
/// unless the header line contains a tab and no comma.
class DelimitedTable {
  public:
    struct Row {
        std::size_t line = 0; // 1-based physical line in the source
        std::vector<std::string> fields;
    };

    static DelimitedTable read(const std::filesystem::path &path);
    static DelimitedTable parse(std::string_view text, std::string source);

    const std::string &source() const noexcept { return source_; }
    const std::vector<std::string> &header() const noexcept { return header_; }
    const std::vector<Row> &rows() const noexcept { return rows_; }
    /// Comment lines of the form "# key=value" that precede the header.
    const std::vector<std::pair<std::string, std::string>> &directives() const noexcept {
        return directives_;
    }

    std::optional<std::size_t> column(std::string_view name) const;
    /// Throws ValidationError naming every missing column.
    void require_columns(const std::vector<std::string_view> &names) const;
    /// Field of `row` under column `name`; the column must exist.
    const std::string &field(const Row &row, std::string_view name) const;

  private:
    std::string source_;
    std::vector<std::string> header_;
    std::vector<Row> rows_;
    std::vector<std::pair<std::string, std::string>> directives_;
};

std::string_view trim(std::string_view text);
std::vector<std::string> split(std::string_view text, char delimiter);
std::string read_text_file(const std::filesystem::path &path);

} // namespace nowcast
