#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "gsim/dram.hpp"

namespace gsim {

std::string_view to_string(DramStandard s) {
  switch (s) {
    case DramStandard::DDR3: return "DDR3";
    case DramStandard::DDR4: return "DDR4";
    case DramStandard::HBM: return "HBM";
  }
  return "?";
}

std::uint32_t DramConfig::burst_cycles() const {
  double cycles = burst_length * clock_mhz / data_rate;
  auto rounded = static_cast<std::uint32_t>(cycles + 0.5);
  return std::max<std::uint32_t>(rounded, 1);
}

std::uint64_t DramConfig::rows_per_bank() const {
  std::uint64_t rank_bytes = capacity_gbit * (std::uint64_t{1} << 30) / 8 * (bus_bits / device_width);
  return rank_bytes / (std::uint64_t{banks_per_rank} * row_buffer_bytes);
}

std::uint64_t DramConfig::channel_bytes() const {
  return rows_per_bank() * banks_per_rank * ranks * row_buffer_bytes;
}

void DramConfig::validate() const {
  auto fail = [&](const std::string& why) { throw UsageError("DRAM config " + name + ": " + why); };
  if (channels == 0 || ranks == 0 || bank_groups == 0 || banks_per_rank == 0) fail("counts must be positive");
  if (banks_per_rank % bank_groups != 0) fail("banks must divide evenly into bank groups");
  if (bytes_per_request() != kLineBytes) fail("bus_bits * burst_length / 8 must be 64");
  if (row_buffer_bytes < kLineBytes || row_buffer_bytes % kLineBytes != 0) fail("row buffer must hold whole lines");
  if (device_width == 0 || bus_bits % device_width != 0) fail("bus width must be a multiple of the device width");
  if (clock_mhz <= 0.0 || data_rate == 0) fail("clock and data rate must be positive");
  if (standard == DramStandard::DDR4 && bank_groups < 2) fail("DDR4 needs at least two bank groups");
  if (tCCD_S < burst_cycles() || tCCD_L < tCCD_S) fail("tCCD must cover one burst and tCCD_L >= tCCD_S");
  if (rows_per_bank() == 0) fail("capacity too small for the bank geometry");
  if (queue_depth == 0) fail("queue depth must be positive");
}

DramConfig dram_preset(std::string_view name) {
  DramConfig c;
  if (name == "ddr4" || name == "ddr4-2400") {
    c.name = "ddr4";
    return c;
  }
  if (name == "ddr3" || name == "ddr3-2133") {
    c.name = "ddr3";
    c.standard = DramStandard::DDR3;
    c.bank_groups = 1;
    c.banks_per_rank = 8;
    c.data_rate = 2133;
    c.clock_mhz = 1066.5;
    c.tCL = c.tRCD = c.tRP = c.tCWL = 14;
    c.tRAS = 36;
    c.tRTP = 8;
    c.tWR = 16;
    c.tCCD_S = c.tCCD_L = 4;
    c.capacity_gbit = 8;
    return c;
  }
  if (name == "ddr3-1600") {
    c.name = "ddr3-1600";
    c.standard = DramStandard::DDR3;
    c.ranks = 2;
    c.bank_groups = 1;
    c.banks_per_rank = 8;
    c.data_rate = 1600;
    c.clock_mhz = 800.0;
    c.tCL = c.tRCD = c.tRP = c.tCWL = 11;
    c.tRAS = 28;
    c.tRTP = 6;
    c.tWR = 12;
    c.tCCD_S = c.tCCD_L = 4;
    c.capacity_gbit = 8;
    return c;
  }
  if (name == "hbm") {
    c.name = "hbm";
    c.standard = DramStandard::HBM;
    c.bank_groups = 1;
    c.banks_per_rank = 16;
    c.row_buffer_bytes = 2048;
    c.data_rate = 1000;
    c.clock_mhz = 1000.0;
    c.bus_bits = 128;
    c.burst_length = 4;
    c.tCL = c.tRCD = c.tRP = c.tCWL = 14;
    c.tRAS = 33;
    c.tRTP = 4;
    c.tWR = 15;
    c.tCCD_S = c.tCCD_L = 4;
    c.capacity_gbit = 4;
    c.device_width = 128;
    return c;
  }
  throw UsageError("unknown DRAM preset: " + std::string(name));
}

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

DramConfig parse_dram_config(std::string_view text, std::string_view origin) {
  DramConfig c = dram_preset("ddr4");
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  bool first_key = true;
  auto bad = [&](const std::string& why) {
    throw UsageError(std::string(origin) + ":" + std::to_string(lineno) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::string t = trim(line);
    if (t.empty()) continue;
    auto eq = t.find('=');
    if (eq == std::string::npos) bad("expected key = value");
    std::string key = trim(std::string_view(t).substr(0, eq));
    std::string value = trim(std::string_view(t).substr(eq + 1));
    auto num = [&]() -> std::uint64_t {
      std::uint64_t v = 0;
      auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
      if (ec != std::errc{} || p != value.data() + value.size()) bad("expected an integer for " + key);
      return v;
    };
    auto u32 = [&]() { return static_cast<std::uint32_t>(num()); };
    if (key == "preset") {
      if (!first_key) bad("preset must come first");
      c = dram_preset(value);
    } else if (key == "name") {
      c.name = value;
    } else if (key == "standard") {
      std::string u = value;
      std::transform(u.begin(), u.end(), u.begin(), [](unsigned char ch) { return std::toupper(ch); });
      if (u == "DDR3") c.standard = DramStandard::DDR3;
      else if (u == "DDR4") c.standard = DramStandard::DDR4;
      else if (u == "HBM") c.standard = DramStandard::HBM;
      else bad("unknown standard " + value);
    } else if (key == "channels") c.channels = u32();
    else if (key == "ranks") c.ranks = u32();
    else if (key == "bank_groups") c.bank_groups = u32();
    else if (key == "banks_per_rank") c.banks_per_rank = u32();
    else if (key == "row_buffer_bytes") c.row_buffer_bytes = u32();
    else if (key == "data_rate") c.data_rate = u32();
    else if (key == "clock_mhz") {
      try {
        c.clock_mhz = std::stod(value);
      } catch (const std::exception&) {
        bad("expected a number for clock_mhz");
      }
    } else if (key == "bus_bits") c.bus_bits = u32();
    else if (key == "burst_length") c.burst_length = u32();
    else if (key == "tCL") c.tCL = u32();
    else if (key == "tRCD") c.tRCD = u32();
    else if (key == "tRP") c.tRP = u32();
    else if (key == "tRAS") c.tRAS = u32();
    else if (key == "tRTP") c.tRTP = u32();
    else if (key == "tWR") c.tWR = u32();
    else if (key == "tCCD_S") c.tCCD_S = u32();
    else if (key == "tCCD_L") c.tCCD_L = u32();
    else if (key == "tCWL") c.tCWL = u32();
    else if (key == "capacity_gbit") c.capacity_gbit = num();
    else if (key == "device_width") c.device_width = u32();
    else if (key == "queue_depth") c.queue_depth = u32();
    else bad("unknown key " + key);
    first_key = false;
  }
  c.validate();
  return c;
}

DramConfig load_dram_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read DRAM config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_dram_config(ss.str(), path.string());
}

DramConfig resolve_dram(std::string_view name_or_path) {
  std::string lower(name_or_path);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (lower == "ddr4" || lower == "ddr4-2400" || lower == "ddr3" || lower == "ddr3-2133" || lower == "ddr3-1600" ||
      lower == "hbm") {
    return dram_preset(lower);
  }
  return load_dram_config(std::filesystem::path(name_or_path));
}

}  // namespace gsim
