// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.
// Usage: acceptance [--threads N] [A1 A2 ...]
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "plap/acceptance.hpp"

int main(int argc, char** argv) {
    plap::acceptance::Options opt;
    opt.log = &std::cout;
    std::vector<std::string> ids;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--threads" && i + 1 < argc) {
            opt.threads = std::atoi(argv[++i]);
        } else {
            ids.push_back(arg);
        }
    }
    if (ids.empty())
        for (const auto& c : plap::acceptance::criteria()) ids.push_back(c.first);

    plap::acceptance::Context ctx(opt);
    int failed = 0;
    for (const auto& id : ids) {
        try {
            const auto r = plap::acceptance::run(id, ctx);
            std::cout << plap::acceptance::format(r) << std::endl;
            failed += !r.pass;
        } catch (const std::exception& e) {
            std::cout << id << " FAIL  error: " << e.what() << std::endl;
            ++failed;
        }
    }
    return failed == 0 ? 0 : 1;
}
