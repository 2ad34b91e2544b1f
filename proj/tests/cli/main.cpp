#define DOCTEST_CONFIG_IMPLEMENT
#include <cstdio>
#include <string>
#include <vector>

#include "doctest.h"

namespace {
std::string g_cli_path;
}

namespace aknn::test {
std::string cli_path() { return g_cli_path; }
}  // namespace aknn::test

int main(int argc, char** argv) {
    std::vector<char*> rest;
    for (int i = 0; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg.rfind("--cli=", 0) == 0)
            g_cli_path = arg.substr(6);
        else
            rest.push_back(argv[i]);
    }
    if (g_cli_path.empty()) {
        std::fprintf(stderr, "usage: cli_tests --cli=<path-to-aknn-binary>\n");
        return 1;
    }

    doctest::Context context(int(rest.size()), rest.data());
    return context.run();
}
