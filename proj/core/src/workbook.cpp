#include "littag/workbook.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>

#include "littag/error.hpp"

namespace littag::workbook {

namespace {

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorCode::MalformedWorkbook, what); }

// ---------------------------------------------------------------------------
// ZIP container
// ---------------------------------------------------------------------------

std::uint32_t le16(std::string_view b, std::size_t at) {
  if (at + 2 > b.size()) fail("truncated zip structure");
  return static_cast<std::uint32_t>(static_cast<unsigned char>(b[at])) |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 1])) << 8;
}

std::uint32_t le32(std::string_view b, std::size_t at) { return le16(b, at) | le16(b, at + 2) << 16; }

struct ZipEntry {
  std::uint32_t method = 0;
  std::uint32_t compressed_size = 0;
  std::uint32_t uncompressed_size = 0;
  std::uint32_t local_offset = 0;
};

class ZipArchive {
 public:
  explicit ZipArchive(std::string_view bytes) : bytes_(bytes) {
    constexpr std::uint32_t kEocd = 0x06054b50;
    if (bytes.size() < 22) fail("too small to be a zip archive");
    std::size_t limit = bytes.size() >= 22 + 65535 ? bytes.size() - 22 - 65535 : 0;
    std::optional<std::size_t> eocd;
    for (std::size_t pos = bytes.size() - 22 + 1; pos-- > limit;) {
      if (le32(bytes, pos) == kEocd) {
        eocd = pos;
        break;
      }
    }
    if (!eocd) fail("end of central directory not found");
    std::uint32_t count = le16(bytes, *eocd + 10);
    std::uint32_t cd_offset = le32(bytes, *eocd + 16);
    if (cd_offset == 0xFFFFFFFF || count == 0xFFFF) fail("zip64 archives are not supported");

    std::size_t pos = cd_offset;
    for (std::uint32_t i = 0; i < count; ++i) {
      if (le32(bytes, pos) != 0x02014b50) fail("bad central directory entry");
      ZipEntry entry;
      entry.method = le16(bytes, pos + 10);
      entry.compressed_size = le32(bytes, pos + 20);
      entry.uncompressed_size = le32(bytes, pos + 24);
      std::uint32_t name_len = le16(bytes, pos + 28);
      std::uint32_t extra_len = le16(bytes, pos + 30);
      std::uint32_t comment_len = le16(bytes, pos + 32);
      entry.local_offset = le32(bytes, pos + 42);
      if (pos + 46 + name_len > bytes.size()) fail("truncated central directory");
      entries_.emplace(std::string(bytes.substr(pos + 46, name_len)), entry);
      pos += 46 + name_len + extra_len + comment_len;
    }
  }

  bool contains(const std::string& name) const { return entries_.count(name) != 0; }

  std::string read(const std::string& name) const {
    auto it = entries_.find(name);
    if (it == entries_.end()) fail("missing part " + name);
    const ZipEntry& e = it->second;
    if (le32(bytes_, e.local_offset) != 0x04034b50) fail("bad local header for " + name);
    std::size_t data = e.local_offset + 30 + le16(bytes_, e.local_offset + 26) + le16(bytes_, e.local_offset + 28);
    if (data + e.compressed_size > bytes_.size()) fail("truncated data for " + name);
    std::string_view raw = bytes_.substr(data, e.compressed_size);
    if (e.method == 0) return std::string(raw);
    if (e.method != 8) fail("unsupported compression method for " + name);
    return inflate_raw(raw, e.uncompressed_size, name);
  }

 private:
  static std::string inflate_raw(std::string_view raw, std::uint32_t expected, const std::string& name) {
    z_stream zs{};
    if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) fail("zlib initialisation failed");
    std::string out(expected, '\0');
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(raw.data()));
    zs.avail_in = static_cast<uInt>(raw.size());
    zs.next_out = reinterpret_cast<Bytef*>(out.data());
    zs.avail_out = static_cast<uInt>(out.size());
    int rc = inflate(&zs, Z_FINISH);
    inflateEnd(&zs);
    if (rc != Z_STREAM_END || zs.total_out != expected) fail("corrupt deflate stream in " + name);
    return out;
  }

  std::string_view bytes_;
  std::map<std::string, ZipEntry> entries_;
};

// ---------------------------------------------------------------------------
// XML pull parser (no DTDs, no namespaces beyond prefix stripping)
// ---------------------------------------------------------------------------

struct XmlEvent {
  enum Kind { Start, End, Text, Eof } kind = Eof;
  std::string name;  // local name, prefix stripped
  std::vector<std::pair<std::string, std::string>> attrs;
  bool self_closing = false;
  std::string text;

  std::string attr(std::string_view local) const {
    for (const auto& [k, v] : attrs) {
      auto colon = k.find(':');
      std::string_view bare = colon == std::string::npos ? std::string_view(k) : std::string_view(k).substr(colon + 1);
      if (bare == local) return v;
    }
    return {};
  }
  bool has_attr(std::string_view local) const {
    return std::any_of(attrs.begin(), attrs.end(), [&](const auto& kv) {
      auto colon = kv.first.find(':');
      return (colon == std::string::npos ? kv.first : kv.first.substr(colon + 1)) == local;
    });
  }
};

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out += s[i];
      continue;
    }
    auto semi = s.find(';', i);
    if (semi == std::string_view::npos) fail("unterminated entity");
    auto ent = s.substr(i + 1, semi - i - 1);
    if (ent == "amp") out += '&';
    else if (ent == "lt") out += '<';
    else if (ent == "gt") out += '>';
    else if (ent == "quot") out += '"';
    else if (ent == "apos") out += '\'';
    else if (!ent.empty() && ent[0] == '#') {
      std::uint32_t cp = 0;
      bool hex = ent.size() > 1 && (ent[1] == 'x' || ent[1] == 'X');
      for (char c : ent.substr(hex ? 2 : 1)) {
        int d;
        if (c >= '0' && c <= '9') d = c - '0';
        else if (hex && c >= 'a' && c <= 'f') d = c - 'a' + 10;
        else if (hex && c >= 'A' && c <= 'F') d = c - 'A' + 10;
        else fail("bad character reference");
        cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(d);
      }
      append_utf8(out, cp);
    } else {
      fail("unknown entity &" + std::string(ent) + ";");
    }
    i = semi;
  }
  return out;
}

class XmlReader {
 public:
  explicit XmlReader(std::string doc) : doc_(std::move(doc)) {}

  XmlEvent next() {
    XmlEvent ev;
    if (pending_end_) {
      ev.kind = XmlEvent::End;
      ev.name = std::move(*pending_end_);
      pending_end_.reset();
      return ev;
    }
    for (;;) {
      if (pos_ >= doc_.size()) return ev;
      if (doc_[pos_] != '<') {
        auto lt = doc_.find('<', pos_);
        if (lt == std::string_view::npos) lt = doc_.size();
        ev.kind = XmlEvent::Text;
        ev.text = decode_entities(doc_.substr(pos_, lt - pos_));
        pos_ = lt;
        return ev;
      }
      if (doc_.compare(pos_, 4, "<!--") == 0) {
        skip_past("-->");
        continue;
      }
      if (doc_.compare(pos_, 9, "<![CDATA[") == 0) {
        auto end = doc_.find("]]>", pos_ + 9);
        if (end == std::string_view::npos) fail("unterminated CDATA");
        ev.kind = XmlEvent::Text;
        ev.text = std::string(doc_.substr(pos_ + 9, end - pos_ - 9));
        pos_ = end + 3;
        return ev;
      }
      if (doc_.compare(pos_, 2, "<?") == 0 || doc_.compare(pos_, 2, "<!") == 0) {
        skip_past(">");
        continue;
      }
      return read_tag();
    }
  }

 private:
  void skip_past(std::string_view marker) {
    auto end = doc_.find(marker, pos_);
    if (end == std::string_view::npos) fail("unterminated markup");
    pos_ = end + marker.size();
  }

  static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

  static std::string local(std::string_view qname) {
    auto colon = qname.find(':');
    return std::string(colon == std::string_view::npos ? qname : qname.substr(colon + 1));
  }

  XmlEvent read_tag() {
    XmlEvent ev;
    ++pos_;  // '<'
    bool closing = pos_ < doc_.size() && doc_[pos_] == '/';
    if (closing) ++pos_;
    std::size_t start = pos_;
    while (pos_ < doc_.size() && !is_space(doc_[pos_]) && doc_[pos_] != '>' && doc_[pos_] != '/') ++pos_;
    ev.name = local(doc_.substr(start, pos_ - start));
    if (closing) {
      skip_past(">");
      ev.kind = XmlEvent::End;
      return ev;
    }
    ev.kind = XmlEvent::Start;
    for (;;) {
      while (pos_ < doc_.size() && is_space(doc_[pos_])) ++pos_;
      if (pos_ >= doc_.size()) fail("unterminated tag");
      if (doc_[pos_] == '>') {
        ++pos_;
        break;
      }
      if (doc_[pos_] == '/') {
        if (pos_ + 1 >= doc_.size() || doc_[pos_ + 1] != '>') fail("malformed empty-element tag");
        pos_ += 2;
        ev.self_closing = true;
        pending_end_ = ev.name;
        break;
      }
      std::size_t key_start = pos_;
      while (pos_ < doc_.size() && doc_[pos_] != '=' && !is_space(doc_[pos_])) ++pos_;
      std::string key(doc_.substr(key_start, pos_ - key_start));
      while (pos_ < doc_.size() && is_space(doc_[pos_])) ++pos_;
      if (pos_ >= doc_.size() || doc_[pos_] != '=') fail("attribute without value");
      ++pos_;
      while (pos_ < doc_.size() && is_space(doc_[pos_])) ++pos_;
      if (pos_ >= doc_.size() || (doc_[pos_] != '"' && doc_[pos_] != '\'')) fail("unquoted attribute value");
      char quote = doc_[pos_++];
      auto end = doc_.find(quote, pos_);
      if (end == std::string_view::npos) fail("unterminated attribute value");
      ev.attrs.emplace_back(std::move(key), decode_entities(doc_.substr(pos_, end - pos_)));
      pos_ = end + 1;
    }
    return ev;
  }

  std::string doc_;
  std::size_t pos_ = 0;
  std::optional<std::string> pending_end_;
};

// ---------------------------------------------------------------------------
// Workbook parts
// ---------------------------------------------------------------------------

std::vector<std::string> read_shared_strings(const std::string& xml) {
  std::vector<std::string> out;
  XmlReader reader(xml);
  int phonetic_depth = 0;
  bool in_si = false;
  bool in_t = false;
  std::string current;
  for (auto ev = reader.next(); ev.kind != XmlEvent::Eof; ev = reader.next()) {
    if (ev.kind == XmlEvent::Start) {
      if (ev.name == "si") {
        in_si = true;
        current.clear();
      } else if (ev.name == "rPh") {
        ++phonetic_depth;
      } else if (ev.name == "t") {
        in_t = true;
      }
    } else if (ev.kind == XmlEvent::End) {
      if (ev.name == "si") {
        out.push_back(std::move(current));
        current.clear();
        in_si = false;
      } else if (ev.name == "rPh") {
        --phonetic_depth;
      } else if (ev.name == "t") {
        in_t = false;
      }
    } else if (ev.kind == XmlEvent::Text && in_si && in_t && phonetic_depth == 0) {
      current += ev.text;
    }
  }
  return out;
}

// "BC12" -> 0-based column 54. Returns nullopt when no letters lead.
std::optional<std::size_t> column_of(std::string_view ref) {
  std::size_t col = 0;
  std::size_t i = 0;
  while (i < ref.size() && ref[i] >= 'A' && ref[i] <= 'Z') {
    col = col * 26 + static_cast<std::size_t>(ref[i] - 'A' + 1);
    ++i;
  }
  if (i == 0) return std::nullopt;
  return col - 1;
}

std::vector<csv::Row> read_sheet(const std::string& xml, const std::vector<std::string>& shared) {
  std::map<std::size_t, std::map<std::size_t, std::string>> cells;
  XmlReader reader(xml);
  std::size_t next_row = 0;
  std::size_t current_row = 0;
  std::size_t next_col = 0;
  std::size_t current_col = 0;
  std::string cell_type;
  std::string value;
  bool in_cell = false;
  bool capture = false;
  int inline_phonetic = 0;

  for (auto ev = reader.next(); ev.kind != XmlEvent::Eof; ev = reader.next()) {
    if (ev.kind == XmlEvent::Start) {
      if (ev.name == "row") {
        if (ev.has_attr("r")) {
          current_row = static_cast<std::size_t>(std::stoul(ev.attr("r"))) - 1;
        } else {
          current_row = next_row;
        }
        next_row = current_row + 1;
        next_col = 0;
      } else if (ev.name == "c") {
        in_cell = true;
        auto col = ev.has_attr("r") ? column_of(ev.attr("r")) : std::nullopt;
        current_col = col ? *col : next_col;
        next_col = current_col + 1;
        cell_type = ev.attr("t");
        value.clear();
      } else if (in_cell && (ev.name == "v" || ev.name == "t")) {
        capture = true;
      } else if (in_cell && ev.name == "rPh") {
        ++inline_phonetic;
      }
    } else if (ev.kind == XmlEvent::End) {
      if (ev.name == "c") {
        std::string text;
        if (cell_type == "s") {
          std::size_t idx = value.empty() ? 0 : static_cast<std::size_t>(std::stoul(value));
          if (idx >= shared.size()) fail("shared string index out of range");
          text = shared[idx];
        } else if (cell_type == "b") {
          text = value == "1" ? "TRUE" : "FALSE";
        } else {
          text = value;
        }
        if (!text.empty()) cells[current_row][current_col] = std::move(text);
        in_cell = false;
      } else if (ev.name == "v" || ev.name == "t") {
        capture = false;
      } else if (ev.name == "rPh") {
        --inline_phonetic;
      }
    } else if (ev.kind == XmlEvent::Text && in_cell && capture && inline_phonetic == 0) {
      value += ev.text;
    }
  }

  std::vector<csv::Row> rows;
  if (cells.empty()) return rows;
  std::size_t width = 0;
  for (const auto& [r, cols] : cells) width = std::max(width, cols.rbegin()->first + 1);
  rows.assign(cells.rbegin()->first + 1, csv::Row(width));
  for (auto& [r, cols] : cells) {
    for (auto& [c, text] : cols) rows[r][c] = std::move(text);
  }
  return rows;
}

std::string resolve_target(const std::string& target) {
  if (!target.empty() && target[0] == '/') return target.substr(1);
  return "xl/" + target;
}

}  // namespace

bool looks_like_zip(std::string_view bytes) noexcept {
  return bytes.size() >= 4 && bytes.substr(0, 4) == std::string_view("PK\x03\x04", 4);
}

std::vector<Sheet> read_xlsx(std::string_view bytes) {
  ZipArchive zip(bytes);

  std::map<std::string, std::string> rels;
  {
    XmlReader reader(zip.read("xl/_rels/workbook.xml.rels"));
    for (auto ev = reader.next(); ev.kind != XmlEvent::Eof; ev = reader.next()) {
      if (ev.kind == XmlEvent::Start && ev.name == "Relationship") rels[ev.attr("Id")] = ev.attr("Target");
    }
  }

  std::vector<std::string> shared;
  if (zip.contains("xl/sharedStrings.xml")) shared = read_shared_strings(zip.read("xl/sharedStrings.xml"));

  std::vector<Sheet> sheets;
  XmlReader reader(zip.read("xl/workbook.xml"));
  for (auto ev = reader.next(); ev.kind != XmlEvent::Eof; ev = reader.next()) {
    if (ev.kind != XmlEvent::Start || ev.name != "sheet") continue;
    auto state = ev.attr("state");
    if (state == "hidden" || state == "veryHidden") continue;
    auto rel = rels.find(ev.attr("id"));
    if (rel == rels.end()) fail("sheet '" + ev.attr("name") + "' has no relationship target");
    sheets.push_back(Sheet{ev.attr("name"), read_sheet(zip.read(resolve_target(rel->second)), shared)});
  }
  return sheets;
}

}  // namespace littag::workbook
