#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include "jsmooth/error.hpp"

namespace {
void quiet(const std::string&) {}
}  // namespace

int main(int argc, char** argv) {
    // Expected warnings (truncated d, non-PSD knn kernels) would clutter the log.
    jsmooth::set_warning_sink(quiet);
    doctest::Context context(argc, argv);
    return context.run();
}
