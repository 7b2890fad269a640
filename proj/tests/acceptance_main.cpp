// Runs every acceptance criterion from its shipped preset and prints one
// verdict line per criterion. Nonzero exit when any criterion fails.
#include <nonloc/config.hpp>
#include <nonloc/studies.hpp>

#include <cstdio>
#include <exception>
#include <string>

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: acceptance <preset-dir>\n");
        return 2;
    }
    const std::string dir = argv[1];
    int failures = 0;
    for (int n = 1; n <= 11; ++n) {
        const std::string path = dir + "/ac" + std::to_string(n) + ".toml";
        bool pass = true;
        std::string detail;
        try {
            const nonloc::run_config cfg = nonloc::run_config::parse_file(path);
            const nonloc::study_outcome out = nonloc::run_acceptance(cfg, n);
            pass = out.pass;
            for (const std::string& line : out.lines) {
                if (!detail.empty()) detail += " | ";
                detail += line;
            }
        } catch (const std::exception& e) {
            pass = false;
            detail = e.what();
        }
        if (!pass) ++failures;
        std::printf("AC%-2d %s  %s\n", n, pass ? "PASS" : "FAIL", detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
