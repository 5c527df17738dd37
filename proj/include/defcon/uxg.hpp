#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "defcon/geometry.hpp"

namespace defcon {

// Unblocked-shot expected goal model: logistic regression on six shot
// features plus an intercept.
inline constexpr int kUxgFeatures = 6;

struct ShotRecord {
    // x, y relative to the goal center (attack frame), distance, opening
    // angle, set-piece flag, header flag
    std::array<double, kUxgFeatures> features{};
    int goal = 0;
};

inline std::array<double, kUxgFeatures> shot_features(const Vec2& location, const Pitch& pitch,
                                                      bool right_goal, bool set_piece,
                                                      bool header) {
    const Vec2 goal = pitch.goal_center(right_goal);
    const double x_rel = right_goal ? goal.x - location.x : location.x - goal.x;
    const double y_rel = location.y - goal.y;
    return {x_rel,
            y_rel,
            distance(location, goal),
            goal_opening_angle(location, pitch, right_goal),
            set_piece ? 1.0 : 0.0,
            header ? 1.0 : 0.0};
}

struct UxgModel {
    double intercept = 0.0;
    std::array<double, kUxgFeatures> coefficients{};
    bool converged = false;
    int iterations = 0;

    double predict(const std::array<double, kUxgFeatures>& f) const {
        double z = intercept;
        for (int i = 0; i < kUxgFeatures; ++i) z += coefficients[i] * f[i];
        return 1.0 / (1.0 + std::exp(-z));
    }

    double predict(const Vec2& location, const Pitch& pitch, bool right_goal,
                   bool set_piece = false, bool header = false) const {
        return predict(shot_features(location, pitch, right_goal, set_piece, header));
    }

    nlohmann::json to_json() const {
        return {{"intercept", intercept},
                {"coefficients", coefficients},
                {"converged", converged},
                {"iterations", iterations}};
    }

    static UxgModel from_json(const nlohmann::json& j) {
        UxgModel m;
        m.intercept = j.at("intercept").get<double>();
        const auto& c = j.at("coefficients");
        for (int i = 0; i < kUxgFeatures; ++i) m.coefficients[i] = c.at(i).get<double>();
        m.converged = j.value("converged", true);
        m.iterations = j.value("iterations", 0);
        return m;
    }
};

namespace detail {

// Solve a small dense symmetric system by Gaussian elimination with pivoting.
inline std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
    const int n = static_cast<int>(b.size());
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        if (std::abs(a[col][col]) < 1e-12) {
            a[col][col] += 1e-9;  // ridge fallback for near-singular steps
        }
        for (int r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < n; ++c) s -= a[r][c] * x[c];
        x[r] = s / a[r][r];
    }
    return x;
}

}  // namespace detail

// Maximum-likelihood fit by Newton iterations to gradient norm < 1e-6.
// On (near-)perfect separation the iteration cap is hit and the model is
// returned with converged = false.
inline UxgModel fit_uxg(const std::vector<ShotRecord>& shots, int max_iterations = 100) {
    if (shots.size() < 2) throw std::invalid_argument("fit_uxg: need at least 2 shots");
    bool any_pos = false, any_neg = false;
    for (const auto& s : shots) (s.goal ? any_pos : any_neg) = true;
    if (!any_pos || !any_neg)
        throw std::invalid_argument("fit_uxg: both classes must be present");

    const int dim = kUxgFeatures + 1;
    std::vector<double> beta(dim, 0.0);
    UxgModel model;
    for (int iter = 1; iter <= max_iterations; ++iter) {
        std::vector<double> grad(dim, 0.0);
        std::vector<std::vector<double>> hess(dim, std::vector<double>(dim, 0.0));
        for (const auto& s : shots) {
            double z = beta[0];
            for (int i = 0; i < kUxgFeatures; ++i) z += beta[i + 1] * s.features[i];
            const double p = 1.0 / (1.0 + std::exp(-z));
            const double r = static_cast<double>(s.goal) - p;
            const double w = p * (1.0 - p);
            std::array<double, 7> x{1.0};
            for (int i = 0; i < kUxgFeatures; ++i) x[i + 1] = s.features[i];
            for (int i = 0; i < dim; ++i) {
                grad[i] += r * x[i];
                for (int j = 0; j < dim; ++j) hess[i][j] += w * x[i] * x[j];
            }
        }
        double gnorm = 0.0;
        for (double g : grad) gnorm += g * g;
        gnorm = std::sqrt(gnorm);
        model.iterations = iter;
        if (gnorm < 1e-6) {
            model.converged = true;
            break;
        }
        const std::vector<double> step = detail::solve_dense(hess, grad);
        for (int i = 0; i < dim; ++i) beta[i] += step[i];
    }
    model.intercept = beta[0];
    for (int i = 0; i < kUxgFeatures; ++i) model.coefficients[i] = beta[i + 1];
    return model;
}

// Shot-training CSV: x_m,y_m,distance_m,angle_rad,set_piece,header,goal
inline std::vector<ShotRecord> read_shot_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open shot CSV: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("shot CSV is empty: " + path);
    std::vector<ShotRecord> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string f;
        std::vector<double> vals;
        while (std::getline(ss, f, ',')) vals.push_back(std::stod(f));
        if (vals.size() != 7)
            throw std::runtime_error("shot CSV parse error at line " + std::to_string(lineno));
        ShotRecord r;
        for (int i = 0; i < kUxgFeatures; ++i) r.features[i] = vals[i];
        r.goal = vals[6] >= 0.5 ? 1 : 0;
        out.push_back(r);
    }
    return out;
}

inline void write_shot_csv(const std::string& path, const std::vector<ShotRecord>& shots) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write shot CSV: " + path);
    out << "x_m,y_m,distance_m,angle_rad,set_piece,header,goal\n";
    for (const auto& s : shots) {
        for (int i = 0; i < kUxgFeatures; ++i) out << s.features[i] << ",";
        out << s.goal << "\n";
    }
}

}  // namespace defcon
