#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "afis/raster.hpp"
#include "afis/template.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int status;
    std::string out;
};

Run cli(const std::string& args, const fs::path& dir) {
    const fs::path out = dir / "stdout.txt";
    const std::string cmd = std::string(AFIS_CLI_PATH) + " " + args + " > " + out.string() + " 2> " + (dir / "stderr.txt").string();
    const int raw = std::system(cmd.c_str());
    Run r{WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, {}};
    std::ifstream in(out);
    std::stringstream ss;
    ss << in.rdbuf();
    r.out = ss.str();
    return r;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);)
        out.push_back(l);
    return out;
}

}  // namespace

TEST_CASE("end to end through the command line") {
    afis::testing::TempDir tmp("cli");
    const fs::path d = tmp.path();
    const std::string D = d.string();

    REQUIRE(cli("synth " + D + "/corpus 4 --width 180 --height 180 --seed 5", d).status == 0);
    REQUIRE(fs::exists(d / "corpus" / "synth_000.ppm"));
    REQUIRE(fs::exists(d / "corpus" / "synth_003.gt"));

    SUBCASE("extract and match") {
        REQUIRE(cli("extract " + D + "/corpus/synth_000.ppm " + D + "/a.aft --dump-stages " + D + "/stages", d).status == 0);
        afis::Template a = afis::parse(afis::read_file(D + "/a.aft"));
        CHECK(a.mode == afis::DistanceMode::PaperFaithful);
        for (const char* name : {"1_filtered.pgm", "2_enhanced.pgm", "3_lined.pgm", "4_shaped.pgm"})
            CHECK(afis::load_image(afis::read_file((d / "stages" / name).string())).width() == 180);

        Run same = cli("match " + D + "/a.aft " + D + "/a.aft", d);
        CHECK(same.status == 0);
        CHECK(same.out.find(",1.000000,accept") != std::string::npos);

        REQUIRE(cli("--mode canonical extract " + D + "/corpus/synth_000.ppm " + D + "/c.aft", d).status == 0);
        CHECK(afis::read_file(D + "/c.aft").find("\nmode canonical\n") != std::string::npos);
        CHECK(cli("match " + D + "/a.aft " + D + "/c.aft", d).status == 2);

        REQUIRE(cli("extract " + D + "/corpus/synth_001.ppm " + D + "/b.aft", d).status == 0);
        CHECK(cli("match " + D + "/a.aft " + D + "/b.aft", d).status == 1);

        CHECK(cli("extract " + D + "/missing.ppm " + D + "/x.aft", d).status == 2);
        CHECK(cli("match " + D + "/a.aft " + D + "/missing.aft", d).status == 2);
    }

    SUBCASE("config file sits between flags and defaults") {
        std::ofstream(d / "afis.conf") << "# shared settings\nmode=canonical\n";
        REQUIRE(cli("--config " + D + "/afis.conf extract " + D + "/corpus/synth_000.ppm " + D + "/k.aft", d).status == 0);
        CHECK(afis::read_file(D + "/k.aft").find("\nmode canonical\n") != std::string::npos);
        REQUIRE(cli("--config " + D + "/afis.conf --mode paper extract " + D + "/corpus/synth_000.ppm " + D + "/p.aft", d)
                    .status == 0);
        CHECK(afis::read_file(D + "/p.aft").find("\nmode paper\n") != std::string::npos);
    }

    SUBCASE("enroll and verify") {
        const std::string img = D + "/corpus/synth_002.ppm";
        CHECK(cli("verify " + D + "/store s1 " + img, d).status == 2);
        CHECK(cli("enroll " + D + "/store s1 " + img, d).status == 0);
        CHECK(cli("verify " + D + "/store s1 " + img, d).status == 0);
        CHECK(cli("verify " + D + "/store s1 " + D + "/corpus/synth_003.ppm", d).status == 1);
        CHECK(cli("enroll " + D + "/store s1 " + img, d).status == 2);
        CHECK(cli("enroll " + D + "/store s1 " + img + " --overwrite", d).status == 0);
        CHECK(cli("enroll " + D + "/store bad.id " + img, d).status == 2);
    }

    SUBCASE("evaluate") {
        Run r = cli("evaluate " + D + "/corpus " + D + "/corpus " + D + "/reports", d);
        REQUIRE(r.status == 0);
        auto t1 = lines(afis::read_file(D + "/reports/table1.csv"));
        REQUIRE(t1.size() == 5);
        for (std::size_t i = 1; i < t1.size(); ++i) {
            std::istringstream row(t1[i]);
            std::string cell;
            std::vector<long> v;
            std::getline(row, cell, ',');
            while (std::getline(row, cell, ','))
                v.push_back(std::stol(cell));
            CHECK(v[1] == v[4] + v[3]);  // selected = correct + false
            CHECK(v[0] == v[4] + v[2]);  // contained = correct + dropped
        }
        CHECK(fs::exists(d / "reports" / "table2.csv"));
        CHECK(fs::exists(d / "reports" / "fig2.csv"));
        CHECK(fs::exists(d / "reports" / "fig3.csv"));
        CHECK(r.out.rfind("image,false_pct,drop_pct,correct_pct\n", 0) == 0);

        fs::create_directories(d / "empty");
        CHECK(cli("evaluate " + D + "/empty " + D + "/corpus " + D + "/r2", d).status == 2);
        CHECK(cli("evaluate " + D + "/corpus " + D + "/empty " + D + "/r3", d).status == 2);
    }

    SUBCASE("bench") {
        Run r = cli("synth " + D + "/full 1 --seed 3", d);
        REQUIRE(r.status == 0);
        fs::remove(d / "full" / "synth_000.gt");
        r = cli("bench " + D + "/full " + D + "/bench --repetitions 3", d);
        CHECK(r.status == 0);
        CHECK(lines(afis::read_file(D + "/bench/fig4.csv")).size() == 2);
        CHECK(lines(afis::read_file(D + "/bench/fig5.csv")).size() == 2);
        CHECK(cli("bench " + D + "/full " + D + "/bench2 --repetitions 3 --min-ratio 1000000", d).status == 2);
    }

    SUBCASE("usage errors") {
        CHECK(cli("", d).status == 2);
        CHECK(cli("frobnicate", d).status == 2);
        CHECK(cli("--mode sideways extract a b", d).status == 2);
    }
}
