#include "harv/params.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <stdexcept>

namespace harv {

void HarvesterParams::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0))
            throw std::invalid_argument(std::string("HarvesterParams: ") + name +
                                        " must be positive");
    };
    positive(J, "J");
    positive(c, "c");
    positive(k, "k");
    positive(mu0, "mu0");
    positive(M0, "M0");
    positive(M1, "M1");
    positive(V0, "V0");
    positive(V1, "V1");
    positive(A, "A");
    positive(Omega, "Omega");
    positive(h, "h");
    positive(Lg, "Lg");
    positive(Rload, "Rload");
    if (Rg < 0.0) throw std::invalid_argument("HarvesterParams: Rg must be non-negative");
    if (gamma_em < 0.0)
        throw std::invalid_argument("HarvesterParams: gamma_em must be non-negative");
    const double expect = mu0 * M0 * V0 * M1 * V1 / (4.0 * M_PI);
    if (alpha != expect)
        throw std::invalid_argument("HarvesterParams: alpha stale; call finalize()");
}

namespace {

const char* const kFields[] = {"J",  "c",  "k",  "theta0", "A",  "Omega", "b",     "h",  "mu0",
                               "M0", "M1", "V0", "V1",     "Lg", "Rg",    "Rload", "gamma_em"};

double* field_ptr(HarvesterParams& p, const std::string& name) {
    if (name == "J") return &p.J;
    if (name == "c") return &p.c;
    if (name == "k") return &p.k;
    if (name == "theta0") return &p.theta0;
    if (name == "A") return &p.A;
    if (name == "Omega") return &p.Omega;
    if (name == "b") return &p.b;
    if (name == "h") return &p.h;
    if (name == "mu0") return &p.mu0;
    if (name == "M0") return &p.M0;
    if (name == "M1") return &p.M1;
    if (name == "V0") return &p.V0;
    if (name == "V1") return &p.V1;
    if (name == "Lg") return &p.Lg;
    if (name == "Rg") return &p.Rg;
    if (name == "Rload") return &p.Rload;
    if (name == "gamma_em") return &p.gamma_em;
    return nullptr;
}

} // namespace

std::string params_to_json_text(const HarvesterParams& p) {
    nlohmann::json j;
    HarvesterParams copy = p;
    for (const char* name : kFields) j[name] = *field_ptr(copy, name);
    return j.dump(2) + "\n";
}

HarvesterParams params_from_json_text(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    HarvesterParams p;
    for (const char* name : kFields) {
        if (!j.contains(name))
            throw std::invalid_argument(std::string("params file missing field: ") + name);
        *field_ptr(p, name) = j.at(name).get<double>();
    }
    p.finalize();
    p.validate();
    return p;
}

HarvesterParams load_params(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open params file: " + path);
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return params_from_json_text(text);
}

void save_params(const HarvesterParams& p, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << params_to_json_text(p);
}

} // namespace harv
