#ifndef PATHDET_RATIONAL_HPP
#define PATHDET_RATIONAL_HPP

#include <gmpxx.h>

#include <cstddef>
#include <string>
#include <vector>

namespace pathdet {

using Rational = mpq_class;

// mpq_class(num, den) does not reduce; every pair constructor goes through here.
inline Rational make_rational(long num, long den)
{
    Rational q(num, den);
    q.canonicalize();
    return q;
}

// Dense row-major matrix of exact rationals.
class QMatrix {
public:
    QMatrix() = default;
    QMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, Rational(0)) {}

    static QMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Rational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Rational& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    QMatrix transpose() const;
    Rational trace() const;
    bool operator==(const QMatrix& other) const;
    bool operator!=(const QMatrix& other) const { return !(*this == other); }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Rational> data_;
};

QMatrix operator*(const QMatrix& a, const QMatrix& b);
QMatrix operator+(const QMatrix& a, const QMatrix& b);
QMatrix operator-(const QMatrix& a, const QMatrix& b);
QMatrix operator*(const Rational& s, const QMatrix& a);

// Fraction-free (Bareiss) elimination with row pivoting on nonzero entries.
Rational determinant(const QMatrix& a);

// Gauss-Jordan inverse; returns false when singular.
bool try_inverse(const QMatrix& a, QMatrix& out);

std::string to_string(const Rational& q);

} // namespace pathdet

#endif
