#include "swipt/validation.hpp"

#include <doctest.h>

#include <sstream>

using namespace swipt;

TEST_CASE("validation: cheap gates pass in fast mode") {
    ValidationOptions o;
    o.fast = true;
    o.only = {1, 2};
    std::ostringstream log;
    o.log = &log;
    const ValidationReport r = run_validation(o);
    REQUIRE(r.gates.size() == 2);
    CHECK(r.gates[0].name == "gradient_fidelity");
    CHECK(r.gates[1].name == "projection");
    for (const auto& g : r.gates) CHECK_MESSAGE(g.passed, g.detail);
    CHECK(r.passed());
    CHECK(log.str().find("[PASS]") != std::string::npos);
}

TEST_CASE("validation: a corrupted gradient fails the gradient gate") {
    ValidationOptions o;
    o.fast = true;
    o.only = {1};
    o.gradient_hook = [](TripleGradient& g) { g.an *= 1.01; };
    const ValidationReport r = run_validation(o);
    REQUIRE(r.gates.size() == 1);
    CHECK_FALSE(r.gates[0].passed);
    CHECK_FALSE(r.passed());
    const std::string line = format_gate_line(r.gates[0]);
    CHECK(line.find("[FAIL]") != std::string::npos);
    CHECK(line.find("gradient_fidelity") != std::string::npos);
}

TEST_CASE("validation: report serializes every gate") {
    ValidationOptions o;
    o.fast = true;
    o.only = {2};
    const std::string j = run_validation(o).to_json();
    CHECK(j.find("\"projection\"") != std::string::npos);
}
