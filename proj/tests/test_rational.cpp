#include <doctest.h>

#include "pathdet/rational.hpp"

using namespace pathdet;

TEST_SUITE_BEGIN("rational");

TEST_CASE("determinant of small matrices")
{
    QMatrix a(2, 2);
    a(0, 0) = 2; a(0, 1) = 1;
    a(1, 0) = 1; a(1, 1) = 2;
    CHECK(determinant(a) == 3);

    QMatrix z(3, 3);
    z(0, 1) = 1; z(1, 0) = 1; z(2, 2) = Rational(1, 2);
    CHECK(determinant(z) == Rational(-1, 2));

    QMatrix s(2, 2);
    s(0, 0) = 1; s(0, 1) = 2;
    s(1, 0) = 2; s(1, 1) = 4;
    CHECK(determinant(s) == 0);
    CHECK(determinant(QMatrix(0, 0)) == 1);
}

TEST_CASE("determinant agrees with permutation expansion")
{
    // Leibniz formula as an independent oracle on 4x4 rationals.
    QMatrix m(4, 4);
    int v = 1;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) m(i, j) = make_rational((v * 7) % 11 - 5, (v % 3) + 1), ++v;
    std::vector<int> p = {0, 1, 2, 3};
    Rational leibniz = 0;
    do {
        int inv = 0;
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) inv += p[i] > p[j];
        Rational term = inv % 2 ? -1 : 1;
        for (int i = 0; i < 4; ++i) term *= m(i, p[i]);
        leibniz += term;
    } while (std::next_permutation(p.begin(), p.end()));
    CHECK(determinant(m) == leibniz);
}

TEST_CASE("inverse")
{
    QMatrix a(3, 3);
    a(0, 0) = 0; a(0, 1) = 1; a(0, 2) = Rational(1, 3);
    a(1, 0) = 2; a(1, 1) = 0; a(1, 2) = 1;
    a(2, 0) = -1; a(2, 1) = 1; a(2, 2) = 0;
    QMatrix inv;
    REQUIRE(try_inverse(a, inv));
    CHECK(a * inv == QMatrix::identity(3));
    CHECK(inv * a == QMatrix::identity(3));

    QMatrix s(2, 2);
    s(0, 0) = 1; s(0, 1) = 1; s(1, 0) = 1; s(1, 1) = 1;
    CHECK_FALSE(try_inverse(s, inv));
}

TEST_SUITE_END();
