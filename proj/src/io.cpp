#include "olp/io.hpp"

#include <sstream>

#include "json.hpp"

namespace olp {

std::string fnv1a_hex(const std::string& text) {
    unsigned long long h = 14695981039346656037ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

std::string serialize_equilibrium(const ExternalField& field, const EquilibriumData& eq) {
    std::ostringstream os;
    os << "# equilibrium field=" << fnv1a_hex(field.signature()) << "\n";
    os << "N " << eq.N << "\n";
    os << "endpoints";
    for (const Real& e : eq.endpoints) os << " " << decimal_from_real(e);
    os << "\n";
    os << "ell " << decimal_from_real(eq.ell) << "\n";
    os << "Q_re " << decimal_from_real(eq.Q_re) << "\n";
    os << "Q_im " << decimal_from_real(eq.Q_im) << "\n";
    os << "band_masses";
    for (const Real& m : eq.band_masses) os << " " << decimal_from_real(m);
    os << "\n";
    os << "residual_norm " << decimal_from_real(eq.residual_norm) << "\n";
    return os.str();
}

std::string serialize_surface(const ExternalField& field, const EquilibriumData& eq,
                              const SurfaceData& surf) {
    std::ostringstream os;
    std::string eq_hash = fnv1a_hex(serialize_equilibrium(field, eq));
    os << "# surface endpoints=" << eq_hash << "\n";
    os << "N " << surf.N() << "\n";
    auto emit_matrix = [&](const char* name, const auto& m) {
        os << name << "\n";
        for (const auto& row : m) {
            bool first = true;
            for (const auto& v : row) {
                if (!first) os << " ";
                first = false;
                if constexpr (std::is_same_v<std::decay_t<decltype(v)>, Cplx>)
                    os << decimal_from_real(v.re) << "+i*" << decimal_from_real(v.im);
                else
                    os << decimal_from_real(v);
            }
            os << "\n";
        }
    };
    emit_matrix("alpha_matrix", surf.alpha_matrix());
    emit_matrix("c_matrix", surf.c_matrix());
    emit_matrix("tau", surf.tau());
    os << "omega";
    for (const Real& v : surf.omega()) os << " " << decimal_from_real(v);
    os << "\nu_inf_plus";
    for (const Real& v : surf.u_inf_plus()) os << " " << decimal_from_real(v);
    os << "\nd_vector";
    for (const Cplx& v : surf.d_vector())
        os << " " << decimal_from_real(v.re) << "+i*" << decimal_from_real(v.im);
    os << "\ngap_zeros";
    for (const Real& v : surf.gap_zeros()) os << " " << decimal_from_real(v);
    os << "\n";
    return os.str();
}

RunConfig parse_run_config(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    RunConfig cfg;
    const auto& fld = j.at("field");
    for (const auto& [key, value] : fld.at("coefficients").items())
        cfg.field_coefficients[std::stoi(key)] = value.get<std::string>();
    if (fld.contains("z_o")) cfg.z_o = fld["z_o"].get<std::string>();
    for (const auto& v : j.at("n")) cfg.n_values.push_back(v.get<int>());
    if (j.contains("precision_bits")) cfg.precision_bits = j["precision_bits"].get<unsigned>();
    if (j.contains("oracle_precision_bits"))
        cfg.oracle_precision_bits = j["oracle_precision_bits"].get<unsigned>();
    if (cfg.precision_bits < 128 || cfg.oracle_precision_bits < 128)
        throw std::invalid_argument("config: precision must be at least 128 bits");
    for (int n : cfg.n_values)
        if (n <= 0) throw std::invalid_argument("config: n values must be positive");
    if (j.contains("N")) {
        if (j["N"].is_string())
            cfg.N = -1;  // "auto"
        else
            cfg.N = j["N"].get<int>();
    }
    if (j.contains("N_max")) cfg.N_max = j["N_max"].get<int>();
    if (j.contains("endpoint_guess"))
        for (const auto& v : j["endpoint_guess"]) cfg.endpoint_guess.push_back(v.get<std::string>());
    if (j.contains("points"))
        for (const auto& p : j["points"])
            cfg.points.emplace_back(p.at("re").get<std::string>(),
                                    p.contains("im") ? p["im"].get<std::string>() : "0");
    if (j.contains("grid")) {
        const auto& g = j["grid"];
        int count = g.at("count").get<int>();
        double re0 = std::stod(g.at("re_from").get<std::string>());
        double re1 = std::stod(g.at("re_to").get<std::string>());
        double im = g.contains("im") ? std::stod(g["im"].get<std::string>()) : 0.0;
        for (int i = 0; i < count; ++i) {
            double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
            cfg.points.emplace_back(std::to_string(re0 + (re1 - re0) * t), std::to_string(im));
        }
    }
    if (j.contains("corrections")) cfg.corrections = j["corrections"].get<bool>();
    if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("cache_dir")) cfg.cache_dir = j["cache_dir"].get<std::string>();
    if (j.contains("n_max_oracle")) cfg.n_max_oracle = j["n_max_oracle"].get<int>();
    if (j.contains("tol_newton")) cfg.tol_newton = j["tol_newton"].get<std::string>();
    return cfg;
}

}  // namespace olp
