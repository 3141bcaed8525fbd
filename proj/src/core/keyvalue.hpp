#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nowcast {

/// Plain-text `key = value` configuration, optionally split into `[section]`
/// blocks. Entry order is preserved; '#' starts a comment line.
class KeyValueFile {
  public:
    struct Entry {
        std::string key;
        std::string value;
        std::size_t line = 0;
    };
    struct Section {
        std::string name; // empty for entries before the first header
        std::size_t line = 0;
        std::vector<Entry> entries;

        const Entry *find(std::string_view key) const;
    };

    static KeyValueFile read(const std::filesystem::path &path);
    static KeyValueFile parse(std::string_view text, std::string source);

    const std::string &source() const noexcept { return source_; }
    const std::vector<Section> &sections() const noexcept { return sections_; }
    /// The unnamed leading section (may be empty).
    const Section &globals() const { return sections_.front(); }

  private:
    std::string source_;
    std::vector<Section> sections_;
};

std::optional<bool> parse_bool(std::string_view text);
std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_integer(std::string_view text);

} // namespace nowcast
