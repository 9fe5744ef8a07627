#include <doctest.h>
TEST_CASE("control placeholder") { CHECK(true); }
