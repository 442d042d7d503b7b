#include <doctest.h>

#include <filesystem>
#include <functional>
#include <string>

#include "bcfkit/error.hpp"
#include "bcfkit/json_io.hpp"

using namespace bcfkit;
using bcfkit::io::json;

namespace {

std::string message_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const std::exception& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST_SUITE("json") {
    TEST_CASE("model round trip") {
        const FitSDModel m(5, {PoleTerm{1.27e4, {{183, 9.17}, {67.6, 178}, {1.76, 11.1}}}});
        const auto j = io::model_to_json(m);
        const auto back = io::parse_model(io::parse_json_text(j.dump()));
        CHECK(back.n() == 5);
        for (double w : {0.5, 10.0, 183.0, 1000.0}) CHECK(back(w) == m(w));
    }

    TEST_CASE("reference round trip") {
        const ReferenceSD parts[] = {ReferenceSD(DrudeLorentz{35.0, 53.0}), ReferenceSD(OhmicExp{0.3, 100.0}),
                                     ReferenceSD(LogNormal{0.3, 0.7, 38.0}),
                                     ReferenceSD(DampedVibration{0.3, 100.0, 180.0, 0.03})};
        for (const auto& r : parts) {
            const auto back = io::parse_reference(io::reference_to_json(r));
            CHECK(back.kind() == r.kind());
            CHECK(back(57.0) == r(57.0));
        }
        const auto any = io::parse_any_sd(json::parse(R"({"kind":"log_normal","S":0.3,"sigma":0.7,"omega_c":38})"));
        CHECK(std::holds_alternative<ReferenceSD>(any));
        CHECK(io::view(any).J(38.0) > 0.0);
    }

    TEST_CASE("fit config round trip and defaults") {
        FitConfig c;
        c.n = 3;
        c.poles_per_term = {2, 2};
        c.seed = 42;
        c.grid.count = 123;
        const auto back = io::parse_fit_config(io::fit_config_to_json(c));
        CHECK(back.n == 3);
        CHECK(back.poles_per_term == std::vector<int>{2, 2});
        CHECK(back.seed == 42);
        CHECK(back.grid.count == 123);
        const auto minimal = io::parse_fit_config(json::parse(R"({"n":5,"poles_per_term":[3]})"));
        CHECK(minimal.multistarts == FitConfig{}.multistarts);
    }

    TEST_CASE("even n is rejected with an explanation") {
        const auto msg = message_of([] {
            io::parse_model(json::parse(R"({"n":4,"terms":[{"p":1,"poles":[[1,1],[2,2],[3,3]]}]})"));
        });
        CHECK(msg.find("model.n") != std::string::npos);
        CHECK(msg.find("even n is not supported") != std::string::npos);
    }

    TEST_CASE("field paths in validation errors") {
        const auto msg = message_of([] {
            io::parse_model(json::parse(R"({"n":1,"terms":[{"p":1,"poles":[[1,1],[2,-2]]}]})"));
        });
        CHECK(msg.find("model.terms[0].poles[1]") != std::string::npos);
        CHECK_THROWS_AS(io::parse_model(json::parse(R"({"n":1,"terms":[{"p":1,"poles":[[1,1]]}],"x":0})")),
                        ValidationError);
        CHECK_THROWS_AS(io::parse_reference(json::parse(R"({"kind":"unknown"})")), ValidationError);
        CHECK_THROWS_AS(io::parse_model(json::parse(R"({"n":1,"terms":[{"p":-1,"poles":[[1,1]]}]})")),
                        ValidationError);
    }

    TEST_CASE("syntax errors report line and column") {
        const auto msg = message_of([] { io::parse_json_text("{\n  \"n\": 5,\n  \"terms\": [,]\n}", "m.json"); });
        CHECK(msg.find("m.json") != std::string::npos);
        CHECK(msg.find("3") != std::string::npos);
        CHECK_THROWS_AS(io::parse_json_text("{", "x"), ValidationError);
        CHECK_THROWS_AS(io::load_json_file("/nonexistent/file.json"), IoError);
    }

    TEST_CASE("bcf serialisation") {
        ExponentialBCF b;
        b.modes = {Mode{cplx(1.0, 2.0), cplx(3.0, 4.0)}};
        b.T_kelvin = 77.0;
        b.source.scheme = CothScheme::Pade;
        b.source.L = 2;
        const auto j = io::bcf_to_json(b);
        CHECK(j["M"] == 1);
        CHECK(j["modes"][0]["w"][1] == 4.0);
        CHECK(j["scheme"] == "pade");
    }

    TEST_CASE("shipped examples and schemas parse") {
        const std::filesystem::path docs = BCFKIT_DOCS_DIR;
        int count = 0;
        for (const auto& e : std::filesystem::directory_iterator(docs / "examples")) {
            const auto j = io::load_json_file(e.path());
            const auto name = e.path().filename().string();
            if (name.rfind("fit_", 0) == 0) CHECK_NOTHROW(resolve_config(io::parse_fit_config(j)));
            else CHECK_NOTHROW(io::parse_any_sd(j));
            ++count;
        }
        CHECK(count >= 5);
        for (const char* s : {"model", "reference", "fit_config"})
            CHECK(io::load_json_file(docs / "schemas" / (std::string(s) + ".schema.json")).is_object());
    }
}
