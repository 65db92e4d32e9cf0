#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "minsteg/template_io.hpp"
#include "testutil.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

const fs::path& work_dir() {
    static const fs::path dir = [] {
        const fs::path d = fs::temp_directory_path() / "minsteg_cli_tests";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    const fs::path out = work_dir() / ("stdout." + std::to_string(counter));
    const fs::path err = work_dir() / ("stderr." + std::to_string(counter));
    ++counter;
    const std::string cmd = std::string("'") + MINSTEG_CLI_PATH + "' " + args + " >'" +
                            out.string() + "' 2>'" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = testutil::read_file(out.string());
    r.err = testutil::read_file(err.string());
    return r;
}

std::string fixture_path() {
    const fs::path path = work_dir() / "fixture.mnt";
    if (!fs::exists(path)) {
        minsteg::write_template_file(path.string(), testutil::fixture_template());
    }
    return path.string();
}

void write_file(const fs::path& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << data;
}

}  // namespace

TEST_CASE("embed then extract recovers the payload") {
    const fs::path dir = work_dir();
    const std::string tpl = fixture_path();
    const std::string protected_path = (dir / "protected.mnt").string();
    const std::string recovered_path = (dir / "recovered.bin").string();

    const std::string before = testutil::read_file(tpl);
    RunResult embed = run_cli("embed '" + tpl + "' --payload-hex deadbeef --bits 3 --out '" +
                              protected_path + "'");
    REQUIRE(embed.code == 0);
    CHECK(embed.err.find("total_distortion=") != std::string::npos);
    CHECK(testutil::read_file(tpl) == before);  // inputs are never mutated

    // The protected file parses and keeps the ascending-x order.
    const minsteg::MinutiaeTemplate protected_t =
        minsteg::read_template_file(protected_path);
    CHECK(protected_t.sorted_by_x());

    RunResult extract = run_cli("extract '" + protected_path + "' --bits 3 --out '" +
                                recovered_path + "'");
    REQUIRE(extract.code == 0);
    const std::string recovered = testutil::read_file(recovered_path);
    CHECK(recovered == std::string("\xde\xad\xbe\xef"));
}

TEST_CASE("hex payload and file payload give identical outputs") {
    const fs::path dir = work_dir();
    const std::string tpl = fixture_path();
    write_file(dir / "payload.bin", "\xff");

    RunResult via_hex =
        run_cli("embed '" + tpl + "' --payload-hex ff --bits 2 --out '" +
                (dir / "via_hex.mnt").string() + "'");
    RunResult via_file =
        run_cli("embed '" + tpl + "' --payload-file '" + (dir / "payload.bin").string() +
                "' --bits 2 --out '" + (dir / "via_file.mnt").string() + "'");
    REQUIRE(via_hex.code == 0);
    REQUIRE(via_file.code == 0);
    CHECK(testutil::read_file((dir / "via_hex.mnt").string()) ==
          testutil::read_file((dir / "via_file.mnt").string()));
}

TEST_CASE("oversized payload fails with exit 2 and a capacity message") {
    const std::string tpl = fixture_path();
    // 6 points, b=1: capacity 18 bits, not even room for the length prefix +1 byte.
    RunResult r = run_cli("embed '" + tpl + "' --payload-hex aabbccdd --bits 1 --out '" +
                          (work_dir() / "never.mnt").string() + "'");
    CHECK(r.code == 2);
    CHECK(r.err.find("capacity") != std::string::npos);
}

TEST_CASE("extract with the wrong b fails or returns different bytes") {
    const fs::path dir = work_dir();
    const std::string tpl = fixture_path();
    const std::string protected_path = (dir / "wrongb.mnt").string();
    REQUIRE(run_cli("embed '" + tpl + "' --payload-hex 0102 --bits 4 --out '" + protected_path +
                    "'").code == 0);
    RunResult r = run_cli("extract '" + protected_path + "' --bits 1 --out '" +
                          (dir / "wrongb.bin").string() + "'");
    if (r.code == 0) {
        CHECK(testutil::read_file((dir / "wrongb.bin").string()) != std::string("\x01\x02"));
    } else {
        CHECK(r.code == 2);
    }
}

TEST_CASE("empty payload roundtrip") {
    const fs::path dir = work_dir();
    const std::string tpl = fixture_path();
    const std::string protected_path = (dir / "empty.mnt").string();
    REQUIRE(run_cli("embed '" + tpl + "' --payload-hex '' --bits 2 --out '" + protected_path +
                    "'").code == 0);
    const std::string out_path = (dir / "empty.bin").string();
    RunResult r = run_cli("extract '" + protected_path + "' --bits 2 --out '" + out_path + "'");
    CHECK(r.code == 0);
    CHECK(testutil::read_file(out_path).empty());
}

TEST_CASE("capacity prints bit and byte counts") {
    const fs::path dir = work_dir();
    // 11 points at b=1: 33 bits, 2 usable bytes.
    minsteg::Lcg64 rng(8);
    const std::string tpl11 = (dir / "eleven.mnt").string();
    minsteg::write_template_file(tpl11, testutil::random_template(rng, 11));
    RunResult r = run_cli("capacity '" + tpl11 + "' --bits 1");
    CHECK(r.code == 0);
    CHECK(r.out == "capacity_bits=33\nusable_payload_bytes=2\n");
}

TEST_CASE("match of a template against itself prints score 1") {
    const std::string tpl = fixture_path();
    RunResult r = run_cli("match '" + tpl + "' '" + tpl + "'");
    CHECK(r.code == 0);
    CHECK(r.out.find("score=1\n") != std::string::npos);
    CHECK(r.out.find("matched_pairs=6") != std::string::npos);
}

TEST_CASE("gen is deterministic and respects --format") {
    const fs::path dir = work_dir();
    RunResult a = run_cli("gen --seed 99");
    RunResult b = run_cli("gen --seed 99");
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);

    const std::string bin_path = (dir / "gen.mntb").string();
    REQUIRE(run_cli("gen --seed 99 --out '" + bin_path + "'").code == 0);
    const minsteg::MinutiaeTemplate from_binary = minsteg::read_template_file(bin_path);
    CHECK(minsteg::serialize_text(from_binary) == a.out);
}

TEST_CASE("binary templates work across subcommands") {
    const fs::path dir = work_dir();
    const std::string tpl_bin = (dir / "fixture.mntb").string();
    minsteg::write_template_file(tpl_bin, testutil::fixture_template());
    const std::string out_bin = (dir / "protected.mntb").string();
    REQUIRE(run_cli("embed '" + tpl_bin + "' --payload-hex 1234 --bits 3 --out '" + out_bin +
                    "'").code == 0);
    RunResult r = run_cli("extract '" + out_bin + "' --bits 3");
    CHECK(r.code == 0);
    CHECK(r.out == std::string("\x12\x34"));
}

TEST_CASE("eval writes identical CSV bytes for identical flags") {
    const fs::path dir = work_dir();
    const std::string csv_a = (dir / "eval_a.csv").string();
    const std::string csv_b = (dir / "eval_b.csv").string();
    const std::string flags =
        "eval --db-size 3 --seed 5 --pert-seed 6 --bits 0,2 --min-minutiae 15 --max-minutiae 25 ";
    REQUIRE(run_cli(flags + "--out '" + csv_a + "'").code == 0);
    REQUIRE(run_cli(flags + "--out '" + csv_b + "'").code == 0);
    const std::string a = testutil::read_file(csv_a);
    CHECK(!a.empty());
    CHECK(a == testutil::read_file(csv_b));
    CHECK(a.rfind("b,strategy,order_preserving,threshold,frr,far,", 0) == 0);
}

TEST_CASE("error exit codes") {
    CHECK(run_cli("capacity '/nonexistent/path.mnt' --bits 1").code == 3);   // I/O
    CHECK(run_cli("capacity --bits 1").code == 1);                           // usage
    CHECK(run_cli("--bogus-flag").code == 1);                                // usage
    const fs::path dir = work_dir();
    write_file(dir / "bad.mnt", "not,a,template\n");
    CHECK(run_cli("capacity '" + (dir / "bad.mnt").string() + "' --bits 1").code == 2);
    write_file(dir / "unsorted.mnt", "index,x,y,theta\n1,50,1,1\n2,40,1,1\n");
    CHECK(run_cli("match '" + (dir / "unsorted.mnt").string() + "' '" + fixture_path() +
                  "'").code == 2);
}
