#include <cstdlib>

#include "ipt/kernels.hpp"

namespace ipt::kernels {

namespace {

struct Selected {
  const Ops* ops;
  const char* name;
};

Selected select() {
  if (const char* force = std::getenv("IPT_FORCE_SCALAR");
      force != nullptr && force[0] == '1') {
    return {&scalar_ops(), "scalar(forced)"};
  }
  if (const Ops* avx2 = avx2_ops()) return {avx2, "avx2"};
  return {&scalar_ops(), "scalar"};
}

const Selected& selected() {
  static const Selected s = select();
  return s;
}

}  // namespace

const Ops& active() { return *selected().ops; }
const char* active_name() { return selected().name; }

}  // namespace ipt::kernels
