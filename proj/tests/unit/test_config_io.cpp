#include "doctest.h"

#include <sstream>

#include "simalign/config_io.hpp"

using namespace simalign;

TEST_SUITE("config_io") {
    TEST_CASE("round trip is exact") {
        PointMatrix<double> p(3, 3);
        p << 0.1, -2.5e-7, 3, 1.0 / 3.0, 2, 1e300, -0.0, 5, 6;
        const Configuration c("dom", p, std::vector<int>{2, 5, 9}, std::vector<int>{0, 1, 0});
        std::stringstream s;
        write_configuration_csv(s, c);
        CHECK(read_configuration_csv(s) == c);

        PointMatrix<double> q(2, 2);
        q << 1, 2, 3, 4;
        const Configuration plain("rat1_t1", q);
        std::stringstream s2;
        write_configuration_csv(s2, plain);
        CHECK(s2.str() == "id,seq,group,x,y\nrat1_t1,,,1,2\nrat1_t1,,,3,4\n");
        CHECK(read_configuration_csv(s2) == plain);
    }

    TEST_CASE("parse errors carry line numbers") {
        std::istringstream bad("id,seq,group,x,y\na,,,1,2\na,,,1,oops\n");
        try {
            read_configuration_csv(bad, "f.csv");
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.line() == 3);
            CHECK(std::string(e.what()).find("f.csv:3") != std::string::npos);
        }
        std::istringstream header("id,x,y\n");
        CHECK_THROWS_AS(read_configuration_csv(header), ParseError);
        std::istringstream mixed("id,seq,group,x,y\na,1,,1,2\na,,,1,2\n");
        CHECK_THROWS_AS(read_configuration_csv(mixed), ParseError);
        std::istringstream order("id,seq,group,x,y\na,3,,1,2\na,2,,1,2\n");
        CHECK_THROWS_AS(read_configuration_csv(order), ParseError);
        std::istringstream ids("id,seq,group,x,y\na,,,1,2\nb,,,1,2\n");
        CHECK_THROWS_AS(read_configuration_csv(ids), ParseError);
    }

    TEST_CASE("missing file is an io error") {
        CHECK_THROWS_AS(read_configuration_csv(std::filesystem::path("/nonexistent/x.csv")), IoError);
    }
}
