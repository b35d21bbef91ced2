#include "rsqd/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

namespace rsqd {

namespace {

using nlohmann::json;

const json& field(const json& j, const char* key) {
    if (!j.contains(key)) throw ValidationError(std::string("instance file lacks \"") + key + "\"");
    return j.at(key);
}

double real_at(const json& j, const std::string& where) {
    if (!j.is_number()) throw ValidationError(where + " must be a number");
    return j.get<double>();
}

Eigen::MatrixXd square(const json& j, int n, const std::string& name) {
    if (!j.is_array() || static_cast<int>(j.size()) != n)
        throw ValidationError(name + " must be an array of " + std::to_string(n) + " rows");
    Eigen::MatrixXd m(n, n);
    for (int r = 0; r < n; ++r) {
        const json& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<int>(row.size()) != n)
            throw ValidationError(name + " row " + std::to_string(r + 1) + " must have " + std::to_string(n) + " entries");
        for (int c = 0; c < n; ++c)
            m(r, c) = real_at(row[static_cast<std::size_t>(c)], name + "[" + std::to_string(r + 1) + "][" + std::to_string(c + 1) + "]");
    }
    return m;
}

} // namespace

ProblemInstance instance_from_json(const json& j) {
    if (!j.is_object()) throw ValidationError("instance file must hold a JSON object");
    const json& jd = field(j, "dim");
    if (!jd.is_number_integer() || jd.get<long long>() <= 0) throw ValidationError("dim must be a positive integer");
    const int n = jd.get<int>();

    const json& jh = field(j, "h0");
    if (!jh.is_array() || static_cast<int>(jh.size()) != n)
        throw ValidationError("h0 must be an array of " + std::to_string(n) + " numbers");
    RealVector h0(n);
    for (int i = 0; i < n; ++i) h0[i] = real_at(jh[static_cast<std::size_t>(i)], "h0[" + std::to_string(i + 1) + "]");

    Matrix v = square(field(j, "v_re"), n, "v_re").cast<Complex>();
    if (j.contains("v_im")) v += Complex(0.0, 1.0) * square(j.at("v_im"), n, "v_im").cast<Complex>();

    const json& jm = field(j, "model");
    if (!jm.is_array()) throw ValidationError("model must be an array of 1-based indices");
    std::vector<int> model;
    for (const json& x : jm) {
        if (!x.is_number_integer()) throw ValidationError("model indices must be integers");
        const long long k = x.get<long long>();
        if (k < 1 || k > n) throw ValidationError("model index " + std::to_string(k) + " outside 1.." + std::to_string(n));
        model.push_back(static_cast<int>(k - 1));
    }

    const double lambda = j.contains("lambda") ? real_at(j.at("lambda"), "lambda") : 1.0;
    return ProblemInstance(std::move(h0), std::move(v), std::move(model), lambda);
}

json instance_to_json(const ProblemInstance& inst) {
    const int n = inst.dim();
    json j;
    j["dim"] = n;
    j["h0"] = std::vector<double>(inst.h0().data(), inst.h0().data() + n);
    json re = json::array(), im = json::array();
    bool complex_v = false;
    for (int r = 0; r < n; ++r) {
        std::vector<double> rr, ri;
        for (int c = 0; c < n; ++c) {
            rr.push_back(inst.v()(r, c).real());
            ri.push_back(inst.v()(r, c).imag());
            complex_v = complex_v || inst.v()(r, c).imag() != 0.0;
        }
        re.push_back(rr);
        im.push_back(ri);
    }
    j["v_re"] = re;
    if (complex_v) j["v_im"] = im;
    std::vector<int> model;
    for (int k : inst.model()) model.push_back(k + 1);
    j["model"] = model;
    j["lambda"] = inst.lambda();
    return j;
}

ProblemInstance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open instance file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ValidationError("instance file " + path + " is not valid JSON: " + e.what());
    }
    return instance_from_json(j);
}

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

void write_report_csv(std::ostream& out, const ConvergenceReport& report, bool header, bool with_method) {
    if (header) out << (with_method ? "method," : "") << "lambda,order_or_iter,err_vs_exact,lindgren_residual\n";
    for (const auto& r : report.rows) {
        if (with_method) out << to_string(report.method) << ',';
        out << format_number(r.lambda) << ',' << r.order_or_iter << ',' << format_number(r.err_vs_exact) << ','
            << format_number(r.lindgren_residual) << '\n';
    }
}

json report_summary(const ConvergenceReport& report) {
    json fits = json::array();
    for (const auto& f : report.fits) {
        fits.push_back({{"order_or_iter", f.order_or_iter},
                        {"slope", f.slope},
                        {"intercept", f.intercept},
                        {"fit_residual", f.fit_residual},
                        {"points", f.points}});
    }
    return {{"method", to_string(report.method)}, {"rows", report.rows.size()}, {"fits", fits}};
}

} // namespace rsqd
