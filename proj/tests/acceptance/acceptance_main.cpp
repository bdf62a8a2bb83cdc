#include "degenmax/acceptance.hpp"

#include <cstdlib>
#include <iostream>
#include <string>

int main(int argc, char** argv) {
    using namespace degenmax::acceptance;
    SuiteOptions o;
    if (argc > 1) o.selection = parse_selection(argv[1]);
    if (argc > 2) o.seed = std::strtoull(argv[2], nullptr, 10);
    o.threads = thread_cap();
    bool all = true;
    for (const auto& r : run_suite(o)) {
        std::cout << format_line(r) << std::endl;
        all = all && r.ok();
    }
    return all ? 0 : 1;
}
