#include "ddsim/output.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "ddsim/errors.hpp"

namespace ddsim {

namespace fs = std::filesystem;

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

fs::path unique_path(const fs::path& dir, const std::string& stem, const std::string& ext) {
    fs::create_directories(dir);
    fs::path p = dir / (stem + ext);
    for (int k = 1; fs::exists(p); ++k) p = dir / (stem + "-" + std::to_string(k) + ext);
    return p;
}

void write_atomic(const fs::path& path, const std::string& content) {
    std::random_device rd;
    const fs::path tmp = path.parent_path() / (path.filename().string() + ".tmp" + std::to_string(rd()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) {
            out.close();
            fs::remove(tmp);
            throw std::runtime_error("write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw std::runtime_error("cannot rename onto " + path.string() + ": " + ec.message());
    }
}

std::string series_csv(const std::vector<FidelitySeries>& series) {
    std::ostringstream os;
    os << "t_ns,spectator_state,arm,fidelity,ci_half_width\n";
    for (const auto& s : series)
        for (std::size_t k = 0; k < s.times.size(); ++k)
            os << format_double(s.times[k]) << ',' << to_string(s.spectator) << ',' << s.arm << ','
               << format_double(s.fidelity[k]) << ','
               << format_double(k < s.ci_half_width.size() ? s.ci_half_width[k] : 0.0) << '\n';
    return os.str();
}

std::vector<FidelitySeries> parse_series_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.rfind("t_ns,spectator_state,arm,fidelity", 0) != 0)
        throw ConfigError("not a fidelity CSV (unexpected header)");
    std::vector<FidelitySeries> out;
    std::map<std::pair<std::string, std::string>, std::size_t> index;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');) f.push_back(cell);
        if (f.size() != 5) throw ConfigError("CSV line " + std::to_string(lineno) + ": expected 5 columns");
        const auto key = std::make_pair(f[1], f[2]);
        auto it = index.find(key);
        if (it == index.end()) {
            FidelitySeries s;
            s.spectator = spectator_from_string(f[1]);
            s.arm = f[2];
            out.push_back(s);
            it = index.emplace(key, out.size() - 1).first;
        }
        auto& s = out[it->second];
        try {
            s.times.push_back(std::stod(f[0]));
            s.fidelity.push_back(std::stod(f[3]));
            s.ci_half_width.push_back(std::stod(f[4]));
        } catch (const std::exception&) {
            throw ConfigError("CSV line " + std::to_string(lineno) + ": bad number");
        }
    }
    if (out.empty()) throw ConfigError("CSV has no data rows");
    return out;
}

std::string cancellation_csv(const CancellationReport& report) {
    std::ostringstream os;
    os << "sequence,omega_d,alpha,beta,classification,max_residual,slope\n";
    for (const auto& r : report.rows) {
        const double mx = r.residuals.empty() ? 0.0 : *std::max_element(r.residuals.begin(), r.residuals.end());
        os << report.sequence << ',' << format_double(report.omega_d) << ',' << r.term.alpha << ',' << r.term.beta
           << ',' << to_string(r.cls) << ',' << format_double(mx) << ',' << format_double(r.slope) << '\n';
    }
    return os.str();
}

namespace {

std::string xml_escape(const std::string& s) {
    std::string o;
    for (char c : s) {
        switch (c) {
            case '&': o += "&amp;"; break;
            case '<': o += "&lt;"; break;
            case '>': o += "&gt;"; break;
            case '"': o += "&quot;"; break;
            default: o += c;
        }
    }
    return o;
}

std::string legend_label(const FidelitySeries& s) {
    std::string l;
    switch (s.spectator) {
        case SpectatorState::zero: l = "|0⟩"; break;
        case SpectatorState::one: l = "|1⟩"; break;
        case SpectatorState::plus: l = "|+⟩"; break;
    }
    return s.arm == "free" ? l : l + " " + s.arm;
}

}  // namespace

std::string render_svg(const std::vector<FidelitySeries>& series, const SvgStyle& style) {
    if (series.empty()) throw ValidationError("render_svg: no series");
    double tmax = 0.0;
    for (const auto& s : series)
        for (double t : s.times) tmax = std::max(tmax, t);
    const double t_us = tmax > 0.0 ? tmax / 1000.0 : 1.0;
    const double L = 60, R = 130, T = 30, B = 50;
    const double pw = style.width - L - R, ph = style.height - T - B;
    auto X = [&](double t) { return L + pw * (t / 1000.0) / t_us; };
    auto Y = [&](double f) { return T + ph * (1.0 - std::clamp(f, 0.0, 1.0)); };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << style.width << "\" height=\"" << style.height
       << "\" viewBox=\"0 0 " << style.width << ' ' << style.height << "\">\n"
       << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    if (!style.title.empty())
        os << "<text x=\"" << L << "\" y=\"20\" font-size=\"14\">" << xml_escape(style.title) << "</text>\n";
    for (int k = 0; k <= 4; ++k) {
        const double f = 0.25 * k;
        os << "<text x=\"" << L - 8 << "\" y=\"" << Y(f) + 4 << "\" font-size=\"11\" text-anchor=\"end\">" << f
           << "</text>\n";
        const double t = t_us * 1000.0 * k / 4.0;
        os << "<text x=\"" << X(t) << "\" y=\"" << T + ph + 16 << "\" font-size=\"11\" text-anchor=\"middle\">"
           << format_double(t / 1000.0) << "</text>\n";
    }
    os << "<text x=\"" << L + pw / 2 << "\" y=\"" << style.height - 10
       << "\" font-size=\"12\" text-anchor=\"middle\">time (μs)</text>\n"
       << "<text x=\"15\" y=\"" << T + ph / 2 << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 15 "
       << T + ph / 2 << ")\">fidelity</text>\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& s = series[i];
        const char* c = colors[i % 6];
        os << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t k = 0; k < s.times.size(); ++k)
            os << (k ? " " : "") << X(s.times[k]) << ',' << Y(s.fidelity[k]);
        os << "\"/>\n";
        const double ly = T + 16.0 * double(i + 1);
        os << "<line x1=\"" << L + pw + 10 << "\" y1=\"" << ly << "\" x2=\"" << L + pw + 30 << "\" y2=\"" << ly
           << "\" stroke=\"" << c << "\" stroke-width=\"2\"/>\n"
           << "<text x=\"" << L + pw + 35 << "\" y=\"" << ly + 4 << "\" font-size=\"12\">" << xml_escape(legend_label(s))
           << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace ddsim
