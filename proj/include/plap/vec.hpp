#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace plap {

/// Largest ambient dimension supported by the point type.
inline constexpr int kMaxDim = 6;

/// Points and vectors in R^d, d <= kMaxDim. Stack storage, no heap allocation.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;

inline Vec zeros(int dim) { return Vec::Zero(dim); }

inline Vec unit(int dim, int axis) {
    Vec e = Vec::Zero(dim);
    e[axis] = 1.0;
    return e;
}

/// Parses "1,0" or "1 0" into a point.
inline Vec parse_vec(const std::string& text) {
    Vec v(0);
    std::string token;
    auto flush = [&] {
        if (token.empty()) return;
        if (v.size() == kMaxDim) throw std::invalid_argument("point has too many coordinates: " + text);
        v.conservativeResize(v.size() + 1);
        v[v.size() - 1] = std::stod(token);
        token.clear();
    };
    for (char ch : text) {
        if (ch == ',' || ch == ' ' || ch == '(' || ch == ')') flush();
        else token.push_back(ch);
    }
    flush();
    if (v.size() == 0) throw std::invalid_argument("empty point: '" + text + "'");
    return v;
}

}  // namespace plap
