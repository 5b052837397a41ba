// Reader and writer for the ".dmt" text trace format.
//
//   # comment (anywhere on a line)
//   %object <id> <size> <name>
//   ...
//   <id> <offset>
//   ...
//
// All object declarations precede the first access. Numbers are ASCII
// decimal; names run to the end of the line and may be empty.

#ifndef DMC_TRACE_IO_HPP
#define DMC_TRACE_IO_HPP

#include <cstddef>
#include <iosfwd>
#include <string>

#include "dmc/core.hpp"

namespace dmc {

class DmtParseError : public TraceError {
 public:
  DmtParseError(std::size_t line, const std::string& what)
      : TraceError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

Trace read_dmt(std::istream& in);
void write_dmt(std::ostream& out, const Trace& trace);

Trace load_dmt(const std::string& path);
void save_dmt(const std::string& path, const Trace& trace);

}  // namespace dmc

#endif  // DMC_TRACE_IO_HPP
