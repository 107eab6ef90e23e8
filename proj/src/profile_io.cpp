#include "tdw/profile_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace tdw {

std::filesystem::path metadata_path(const std::filesystem::path& csv) {
    std::filesystem::path p = csv;
    p.replace_extension(".meta.json");
    return p;
}

double parse_double(const std::string& text) {
    std::size_t b = 0;
    std::size_t e = text.size();
    while (b < e && (text[b] == ' ' || text[b] == '\t')) ++b;
    while (e > b && (text[e - 1] == ' ' || text[e - 1] == '\t' || text[e - 1] == '\r')) --e;
    double v = 0.0;
    const char* first = text.data() + b;
    const char* last = text.data() + e;
    if (b < e && *first == '+') ++first;
    const auto res = std::from_chars(first, last, v);
    if (b == e || res.ec != std::errc() || res.ptr != last) throw FileFormatError("not a number: '" + text + "'");
    return v;
}

void write_profile_csv(const WaveProfile& profile, const std::filesystem::path& csv) {
    std::FILE* f = std::fopen(csv.c_str(), "w");
    if (!f) throw FileFormatError("cannot open " + csv.string() + " for writing");
    std::fputs("x,u,w\n", f);
    for (std::size_t i = 0; i < profile.size(); ++i)
        std::fprintf(f, "%.17g,%.17g,%.17g\n", profile.x[i], profile.u[i], profile.w[i]);
    if (std::fclose(f) != 0) throw FileFormatError("write failed for " + csv.string());
}

void save_profile(const WaveProfile& profile, const std::filesystem::path& csv) {
    write_profile_csv(profile, csv);
    nlohmann::json meta = {
        {"gamma", profile.params.gamma},
        {"k", profile.params.k},
        {"eps", profile.eps},
        {"c", profile.c},
        {"method", to_string(profile.method)},
        {"nodes", profile.size()},
        {"solver_residual", profile.solver_residual},
    };
    if (profile.size() >= 5 && profile.method != ProfileMethod::StefanLimit) {
        const auto r = full_tw_residual(profile);
        meta["residual_u"] = r.res_u;
        meta["residual_w"] = r.res_w;
    }
    std::ofstream out(metadata_path(csv));
    if (!out) throw FileFormatError("cannot write sidecar for " + csv.string());
    out << meta.dump(2) << '\n';
}

WaveProfile load_profile(const std::filesystem::path& csv) {
    std::ifstream in(csv);
    if (!in) throw FileFormatError("cannot open profile " + csv.string());
    std::string line;
    if (!std::getline(in, line)) throw FileFormatError("empty profile file " + csv.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "x,u,w") throw FileFormatError("expected header 'x,u,w' in " + csv.string() + ", got '" + line + "'");

    WaveProfile p;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        std::string cell[3];
        std::istringstream ls(line);
        int got = 0;
        for (; got < 3 && std::getline(ls, cell[got], ','); ++got) {}
        std::string extra;
        if (got != 3 || std::getline(ls, extra)) {
            throw FileFormatError(csv.string() + ":" + std::to_string(row) + ": expected 3 columns");
        }
        try {
            p.x.push_back(parse_double(cell[0]));
            p.u.push_back(parse_double(cell[1]));
            p.w.push_back(parse_double(cell[2]));
        } catch (const FileFormatError& e) {
            throw FileFormatError(csv.string() + ":" + std::to_string(row) + ": " + e.what());
        }
    }
    if (p.x.empty()) throw FileFormatError("profile " + csv.string() + " has no rows");

    const auto side = metadata_path(csv);
    if (std::filesystem::exists(side)) {
        try {
            std::ifstream ms(side);
            const auto meta = nlohmann::json::parse(ms);
            p.params.gamma = meta.at("gamma").get<double>();
            p.params.k = meta.at("k").get<double>();
            p.eps = meta.value("eps", 0.0);
            p.params.eps = p.eps;
            p.c = meta.at("c").get<double>();
            p.method = profile_method_from_string(meta.at("method").get<std::string>());
            p.solver_residual = meta.value("solver_residual", 0.0);
        } catch (const FileFormatError&) {
            throw;
        } catch (const std::exception& e) {
            throw FileFormatError("bad sidecar " + side.string() + ": " + e.what());
        }
    }
    return p;
}

}  // namespace tdw
