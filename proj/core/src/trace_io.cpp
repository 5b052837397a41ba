#include "dmc/trace_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

namespace dmc {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Consumes one unsigned decimal token from the front of `s`.
template <typename T>
bool take_number(std::string_view& s, T& value) {
  s = trim(s);
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr == begin) return false;
  if (ptr != end && *ptr != ' ' && *ptr != '\t') return false;
  s.remove_prefix(static_cast<std::size_t>(ptr - begin));
  return true;
}

}  // namespace

Trace read_dmt(std::istream& in) {
  std::vector<DataObject> objects;
  std::vector<Access> accesses;
  std::unordered_map<ObjectId, std::uint64_t> sizes;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '%') {
      constexpr std::string_view kDirective = "%object";
      if (line.substr(0, kDirective.size()) != kDirective ||
          (line.size() > kDirective.size() && line[kDirective.size()] != ' ' &&
           line[kDirective.size()] != '\t'))
        throw DmtParseError(line_no, "unknown directive");
      if (!accesses.empty())
        throw DmtParseError(line_no, "object declared after first access");
      line.remove_prefix(kDirective.size());
      DataObject obj;
      if (!take_number(line, obj.id))
        throw DmtParseError(line_no, "bad object id");
      if (!take_number(line, obj.size))
        throw DmtParseError(line_no, "bad object size");
      if (obj.size < 1) throw DmtParseError(line_no, "object size must be >= 1");
      obj.name = std::string(trim(line));
      if (!sizes.emplace(obj.id, obj.size).second)
        throw DmtParseError(line_no,
                            "duplicate object id " + std::to_string(obj.id));
      objects.push_back(std::move(obj));
      continue;
    }

    Access a;
    if (!take_number(line, a.object))
      throw DmtParseError(line_no, "bad access object id");
    if (!take_number(line, a.offset))
      throw DmtParseError(line_no, "bad access offset");
    if (!trim(line).empty())
      throw DmtParseError(line_no, "trailing characters after access");
    auto it = sizes.find(a.object);
    if (it == sizes.end())
      throw DmtParseError(line_no, "access to undeclared object " +
                                       std::to_string(a.object));
    if (a.offset >= it->second)
      throw DmtParseError(line_no, "offset " + std::to_string(a.offset) +
                                       " out of range for object " +
                                       std::to_string(a.object));
    accesses.push_back(a);
  }

  return Trace(std::move(objects), std::move(accesses));
}

void write_dmt(std::ostream& out, const Trace& trace) {
  out << "# dmt trace: " << trace.objects().size() << " objects, "
      << trace.size() << " accesses\n";
  for (const DataObject& obj : trace.objects()) {
    if (obj.name.find_first_of("#\n\r") != std::string::npos)
      throw TraceError("object name '" + obj.name +
                       "' cannot be written to .dmt");
    out << "%object " << obj.id << ' ' << obj.size;
    if (!obj.name.empty()) out << ' ' << obj.name;
    out << '\n';
  }
  std::string buf;
  buf.reserve(1 << 16);
  char num[24];
  for (const Access& a : trace.accesses()) {
    auto r = std::to_chars(num, num + sizeof num, a.object);
    buf.append(num, r.ptr);
    buf.push_back(' ');
    r = std::to_chars(num, num + sizeof num, a.offset);
    buf.append(num, r.ptr);
    buf.push_back('\n');
    if (buf.size() > (1 << 16) - 64) {
      out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

Trace load_dmt(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TraceError("cannot open trace file '" + path + "'");
  return read_dmt(in);
}

void save_dmt(const std::string& path, const Trace& trace) {
  std::ofstream out(path);
  if (!out) throw TraceError("cannot write trace file '" + path + "'");
  write_dmt(out, trace);
  if (!out) throw TraceError("write failed for '" + path + "'");
}

}  // namespace dmc
