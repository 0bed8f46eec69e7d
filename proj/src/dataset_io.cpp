// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "byteio.hpp"
#include "csiauth/dataset.hpp"
#include "csiauth/errors.hpp"

namespace csiauth::data {

namespace {

constexpr char kDatasetMagic[8] = {'C', 'S', 'A', 'U', 'T', 'H', 'D', 'S'};
constexpr std::uint32_t kDatasetSchemaVersion = 1;
constexpr std::size_t kHeaderBytes = 64;
constexpr std::size_t kTagBytes = 32;
constexpr std::size_t kSubcarriers = 52;
constexpr std::size_t kProvenanceBytes = 96;
constexpr std::size_t kPairBytes = 2 * kSubcarriers * 8 + 2 + kProvenanceBytes;  // 930

void pack_csi(detail::ByteWriter& w, const ofdm::CsiVector& csi) {
    if (csi.estimates.size() != kSubcarriers) {
        throw std::invalid_argument("write_dataset: CSI vector is not 52 subcarriers");
    }
    for (const auto& e : csi.estimates) {
        w.f32(static_cast<float>(e.real()));
        w.f32(static_cast<float>(e.imag()));
    }
}

void pack_provenance(detail::ByteWriter& w, const Provenance& p) {
    w.u8(static_cast<std::uint8_t>(p.kind));
    w.u8(static_cast<std::uint8_t>(p.model));
    w.bytes(p.mac.data(), p.mac.size());
    w.f64(p.snr_db);
    w.f64(p.dt_s);
    w.f64(p.v0_mps);
    w.f64(p.wavelength_m);
    w.f64(p.d_bm_wavelengths);
    w.f64(p.theta);
    w.u64(p.seed);
    w.u64(p.cell_index);
    w.u32(p.pair_index);
    w.u32(p.delta_k);
    w.f64(p.timestamp_a);
    w.f64(p.timestamp_b);
}

Provenance unpack_provenance(detail::ByteReader& r) {
    Provenance p;
    const std::uint8_t kind = r.u8();
    if (kind > 1) {
        throw DataError("'" + r.path + "': bad provenance kind at byte offset " +
                        std::to_string(r.pos - 1));
    }
    p.kind = static_cast<ProvenanceKind>(kind);
    p.model = static_cast<chan::TgnModelId>(r.u8() % 5);
    for (auto& b : p.mac) {
        b = r.u8();
    }
    p.snr_db = r.f64();
    p.dt_s = r.f64();
    p.v0_mps = r.f64();
    p.wavelength_m = r.f64();
    p.d_bm_wavelengths = r.f64();
    p.theta = r.f64();
    p.seed = r.u64();
    p.cell_index = r.u64();
    p.pair_index = r.u32();
    p.delta_k = r.u32();
    p.timestamp_a = r.f64();
    p.timestamp_b = r.f64();
    return p;
}

}  // namespace

void write_dataset(const Dataset& dataset, const std::filesystem::path& path) {
    if (dataset.tag.size() > kTagBytes) {
        throw std::invalid_argument("write_dataset: tag longer than 32 bytes");
    }
    detail::ByteWriter w;
    w.buf.reserve(kHeaderBytes + dataset.pairs.size() * kPairBytes);
    w.bytes(kDatasetMagic, sizeof kDatasetMagic);
    w.u32(dataset.schema_version);
    w.u32(kSubcarriers);
    w.u64(dataset.pairs.size());
    char tag[kTagBytes] = {};
    std::memcpy(tag, dataset.tag.data(), dataset.tag.size());
    w.bytes(tag, kTagBytes);
    w.u64(0);  // reserved

    for (const LabeledPair& pair : dataset.pairs) {
        pack_csi(w, pair.csi_a);
        pack_csi(w, pair.csi_b);
        w.u8(pair.label);
        std::uint8_t flags = 0;
        flags |= pair.csi_a.meta.beyond_cp_span ? 0x01 : 0;
        flags |= pair.csi_b.meta.beyond_cp_span ? 0x02 : 0;
        flags |= pair.csi_a.meta.zero_power_noise ? 0x04 : 0;
        flags |= pair.csi_b.meta.zero_power_noise ? 0x08 : 0;
        w.u8(flags);
        pack_provenance(w, pair.prov);
    }
    detail::write_binary_file(path, w.buf);
}

Dataset read_dataset(const std::filesystem::path& path) {
    const std::string bytes = detail::read_binary_file(path);
    detail::ByteReader r{bytes, 0, path.string()};

    r.need(sizeof kDatasetMagic);
    if (std::memcmp(bytes.data(), kDatasetMagic, sizeof kDatasetMagic) != 0) {
        throw DataError("'" + path.string() + "': not a dataset container (bad magic)");
    }
    r.pos = sizeof kDatasetMagic;

    Dataset ds;
    ds.schema_version = r.u32();
    if (ds.schema_version != kDatasetSchemaVersion) {
        throw DataError("'" + path.string() + "': unsupported dataset schema version " +
                        std::to_string(ds.schema_version) + " (reader supports " +
                        std::to_string(kDatasetSchemaVersion) + ")");
    }
    const std::uint32_t m = r.u32();
    if (m != kSubcarriers) {
        throw DataError("'" + path.string() + "': unexpected subcarrier count " +
                        std::to_string(m));
    }
    const std::uint64_t count = r.u64();
    char tag[kTagBytes + 1] = {};
    r.need(kTagBytes);
    std::memcpy(tag, bytes.data() + r.pos, kTagBytes);
    r.pos += kTagBytes;
    ds.tag = tag;
    r.u64();  // reserved

    const std::size_t expected = kHeaderBytes + count * kPairBytes;
    if (bytes.size() > expected) {
        throw DataError("'" + path.string() + "': " +
                        std::to_string(bytes.size() - expected) +
                        " trailing bytes after byte offset " + std::to_string(expected));
    }

    ds.pairs.resize(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        LabeledPair& pair = ds.pairs[i];
        for (ofdm::CsiVector* csi : {&pair.csi_a, &pair.csi_b}) {
            csi->estimates.resize(kSubcarriers);
            for (auto& e : csi->estimates) {
                const double re = r.f32();
                const double im = r.f32();
                e = {re, im};
            }
        }
        pair.label = r.u8();
        const std::uint8_t flags = r.u8();
        pair.csi_a.meta.beyond_cp_span = flags & 0x01;
        pair.csi_b.meta.beyond_cp_span = flags & 0x02;
        pair.csi_a.meta.zero_power_noise = flags & 0x04;
        pair.csi_b.meta.zero_power_noise = flags & 0x08;
        pair.prov = unpack_provenance(r);
        if (pair.prov.kind == ProvenanceKind::Synthetic) {
            pair.csi_a.meta.snr_db = pair.prov.snr_db;
            pair.csi_b.meta.snr_db = pair.prov.snr_db;
        } else {
            pair.csi_a.meta.timestamp_s = pair.prov.timestamp_a;
            pair.csi_b.meta.timestamp_s = pair.prov.timestamp_b;
        }
    }
    return ds;
}

std::uint64_t file_digest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open '" + path.string() + "'");
    }
    std::uint64_t hash = 0xCBF29CE484222325ull;  // FNV-1a 64
    char chunk[1 << 16];
    while (in) {
        in.read(chunk, sizeof chunk);
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            hash ^= static_cast<std::uint8_t>(chunk[i]);
            hash *= 0x100000001B3ull;
        }
    }
    return hash;
}

// ---- raw capture ingestion -------------------------------------------------

std::array<std::uint8_t, 6> parse_mac(std::string_view text) {
    std::array<std::uint8_t, 6> mac{};
    if (text.size() != 17) {
        throw DataError("bad MAC address '" + std::string(text) + "'");
    }
    for (int i = 0; i < 6; ++i) {
        const std::size_t off = static_cast<std::size_t>(i) * 3;
        if (i < 5 && text[off + 2] != ':') {
            throw DataError("bad MAC address '" + std::string(text) + "'");
        }
        unsigned byte = 0;
        const auto res = std::from_chars(text.data() + off, text.data() + off + 2, byte, 16);
        if (res.ec != std::errc{} || res.ptr != text.data() + off + 2) {
            throw DataError("bad MAC address '" + std::string(text) + "'");
        }
        mac[i] = static_cast<std::uint8_t>(byte);
    }
    return mac;
}

std::string format_mac(const std::array<std::uint8_t, 6>& mac) {
    char out[18];
    std::snprintf(out, sizeof out, "%02x:%02x:%02x:%02x:%02x:%02x", mac[0], mac[1], mac[2],
                  mac[3], mac[4], mac[5]);
    return out;
}

namespace {

bool parse_double_field(std::string_view text, double* out) {
    const auto res = std::from_chars(text.data(), text.data() + text.size(), *out);
    return res.ec == std::errc{} && res.ptr == text.data() + text.size();
}

bool parse_record(std::string_view line, RawCsiRecord* rec) {
    std::array<std::string_view, 5> fields;
    std::size_t start = 0;
    for (int i = 0; i < 4; ++i) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            return false;
        }
        fields[i] = line.substr(start, comma - start);
        start = comma + 1;
    }
    fields[4] = line.substr(start);
    if (fields[4].find(',') != std::string_view::npos) {
        return false;  // more than five columns
    }

    try {
        rec->mac = parse_mac(fields[0]);
    } catch (const DataError&) {
        return false;
    }
    if (!parse_double_field(fields[1], &rec->rssi_dbm) ||
        !parse_double_field(fields[2], &rec->noise_floor) ||
        !parse_double_field(fields[3], &rec->timestamp_s)) {
        return false;
    }

    // 128 signed 8-bit integers: (imaginary, real) per subcarrier.
    std::string_view csi = fields[4];
    int count = 0;
    int values[128];
    std::size_t i = 0;
    while (i < csi.size()) {
        while (i < csi.size() && csi[i] == ' ') {
            ++i;
        }
        if (i >= csi.size()) {
            break;
        }
        if (count >= 128) {
            return false;
        }
        const std::size_t end = std::min(csi.find(' ', i), csi.size());
        int v = 0;
        const auto res = std::from_chars(csi.data() + i, csi.data() + end, v);
        if (res.ec != std::errc{} || res.ptr != csi.data() + end || v < -128 || v > 127) {
            return false;
        }
        values[count++] = v;
        i = end;
    }
    if (count != 128) {
        return false;
    }
    for (int sc = 0; sc < 64; ++sc) {
        rec->subcarriers[sc] = {static_cast<double>(values[2 * sc + 1]),
                                static_cast<double>(values[2 * sc])};
    }
    return true;
}

}  // namespace

std::vector<RawCsiRecord> ingest_raw_csv(const std::filesystem::path& path,
                                         IngestReport* report) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open '" + path.string() + "'");
    }
    IngestReport local;
    IngestReport& rep = report ? *report : local;
    rep = IngestReport{};

    std::vector<RawCsiRecord> records;
    std::string line;
    std::size_t line_number = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (!saw_header) {
            saw_header = true;
            if (line.rfind("mac,", 0) == 0) {
                continue;  // column header
            }
        }
        ++rep.total_rows;
        RawCsiRecord rec;
        if (parse_record(line, &rec)) {
            records.push_back(rec);
        } else {
            ++rep.malformed_rows;
            if (rep.bad_line_numbers.size() < 10) {
                rep.bad_line_numbers.push_back(line_number);
            }
        }
    }
    rep.empty_input = rep.total_rows == 0;

    if (rep.total_rows > 0 &&
        static_cast<double>(rep.malformed_rows) > 0.05 * static_cast<double>(rep.total_rows)) {
        std::string msg = "'" + path.string() + "': " + std::to_string(rep.malformed_rows) +
                          " of " + std::to_string(rep.total_rows) +
                          " rows malformed (>5%); first bad lines:";
        for (std::size_t n : rep.bad_line_numbers) {
            msg += " " + std::to_string(n);
        }
        throw DataError(msg);
    }
    return records;
}

Dataset build_experimental_pairs(std::span<const RawCsiRecord> records, int delta_k_same,
                                 int delta_k_diff, std::string* warning) {
    if (delta_k_same < 1 || delta_k_diff < 1) {
        throw std::invalid_argument("build_experimental_pairs: packet offsets must be >= 1");
    }
    Dataset ds;
    ds.tag = "experimental";
    if (records.empty()) {
        if (warning) {
            *warning = "no records; empty dataset";
        }
        return ds;
    }
    for (const RawCsiRecord& rec : records) {
        if (rec.mac != records.front().mac) {
            throw std::invalid_argument(
                "build_experimental_pairs: records from more than one MAC (" +
                format_mac(records.front().mac) + " and " + format_mac(rec.mac) + ")");
        }
    }
    for (std::size_t k = 1; k < records.size(); ++k) {
        if (records[k].timestamp_s < records[k - 1].timestamp_s) {
            throw std::invalid_argument("build_experimental_pairs: records not time-ordered");
        }
    }

    const std::vector<int> bins = ofdm::occupied_bin_map();
    auto extract = [&](const RawCsiRecord& rec) {
        ofdm::CsiVector csi;
        csi.estimates.reserve(bins.size());
        for (int bin : bins) {
            csi.estimates.push_back(rec.subcarriers[bin]);
        }
        csi.meta.timestamp_s = rec.timestamp_s;
        csi.meta.source = "exp";
        return csi;
    };

    const std::size_t n = records.size();
    auto emit = [&](std::size_t k, std::size_t offset, std::uint8_t label) {
        LabeledPair pair;
        pair.csi_a = extract(records[k]);
        pair.csi_b = extract(records[k + offset]);
        pair.label = label;
        pair.prov.kind = ProvenanceKind::Experimental;
        pair.prov.mac = records[k].mac;
        pair.prov.delta_k = static_cast<std::uint32_t>(offset);
        pair.prov.pair_index = static_cast<std::uint32_t>(k);
        pair.prov.timestamp_a = records[k].timestamp_s;
        pair.prov.timestamp_b = records[k + offset].timestamp_s;
        ds.pairs.push_back(std::move(pair));
    };

    const std::size_t same_off = static_cast<std::size_t>(delta_k_same);
    const std::size_t diff_off = static_cast<std::size_t>(delta_k_diff);
    for (std::size_t k = 0; k + same_off < n; ++k) {
        emit(k, same_off, 0);
    }
    if (n <= diff_off) {
        if (warning) {
            *warning = "only " + std::to_string(n) + " records; need at least " +
                       std::to_string(diff_off + 1) + " for V=1 pairs";
        }
    } else {
        for (std::size_t k = 0; k + diff_off < n; ++k) {
            emit(k, diff_off, 1);
        }
    }
    return ds;
}

}  // namespace csiauth::data
