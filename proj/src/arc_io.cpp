#include "hmk/arc_io.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace hmk {

using nlohmann::json;

std::string arc_to_json(const HybridArc& arc)
{
    json j;
    j["n"] = arc.n;
    j["delta"] = arc.delta ? json(*arc.delta) : json(nullptr);
    json segs = json::array();
    for (const auto& s : arc.segments) {
        json js;
        js["j"] = s.j;
        js["t0"] = s.t0();
        js["t1"] = s.t1();
        json samples = json::array();
        for (size_t i = 0; i < s.t.size(); ++i) {
            json row = json::array();
            row.push_back(s.t[i]);
            for (double v : s.x[i]) row.push_back(v);
            samples.push_back(std::move(row));
        }
        js["samples"] = std::move(samples);
        segs.push_back(std::move(js));
    }
    j["segments"] = std::move(segs);
    return j.dump();
}

HybridArc arc_from_json(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(Errc::InvalidArc, std::string("malformed JSON: ") + e.what());
    }
    HybridArc a;
    try {
        a.n = j.at("n").get<int>();
        if (j.contains("delta") && !j.at("delta").is_null()) a.delta = j.at("delta").get<double>();
        for (const auto& js : j.at("segments")) {
            Segment s;
            s.j = js.at("j").get<int>();
            for (const auto& row : js.at("samples")) {
                if (!row.is_array() || static_cast<int>(row.size()) != a.n + 1)
                    throw Error(Errc::InvalidArc, "sample row has wrong length");
                s.t.push_back(row[0].get<double>());
                Vec x;
                for (size_t c = 1; c < row.size(); ++c) x.push_back(row[c].get<double>());
                s.x.push_back(std::move(x));
            }
            if (s.t.empty()) throw Error(Errc::InvalidArc, "segment without samples");
            if (js.at("t0").get<double>() != s.t0() || js.at("t1").get<double>() != s.t1())
                throw Error(Errc::InvalidArc, "segment bounds disagree with samples");
            a.segments.push_back(std::move(s));
        }
    } catch (const json::exception& e) {
        throw Error(Errc::InvalidArc, std::string("bad arc schema: ") + e.what());
    }
    validate_arc(a);
    return a;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::IoError, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::IoError, "cannot write " + path);
    out << content;
    if (!out) throw Error(Errc::IoError, "write failed for " + path);
}

HybridArc load_arc(const std::string& path) { return arc_from_json(read_file(path)); }

void save_arc(const std::string& path, const HybridArc& arc) { write_file(path, arc_to_json(arc) + "\n"); }

std::string arc_to_csv(const HybridArc& arc)
{
    std::ostringstream os;
    os << std::setprecision(std::numeric_limits<double>::max_digits10);
    os << "t,j";
    for (int c = 0; c < arc.n; ++c) os << ",x" << c;
    os << "\n";
    for (const auto& s : arc.segments)
        for (size_t i = 0; i < s.t.size(); ++i) {
            os << s.t[i] << "," << s.j;
            for (double v : s.x[i]) os << "," << v;
            os << "\n";
        }
    return os.str();
}

}  // namespace hmk
