#include "catenc/error.hpp"

namespace catenc {

void fail_invalid(const std::string& what) { throw InvalidArgument(what); }

}  // namespace catenc
