// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "cdnsim/io.hpp"

#include <fstream>
#include <sstream>

#include "cdnsim/errors.hpp"
#include "json.hpp"

namespace cdnsim {

namespace {

using nlohmann::json;

json parse_document(const std::string& text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw MalformedConfig("document is not valid JSON");
  return doc;
}

}  // namespace

SystemSpec parse_spec(const std::string& json_text) {
  const json doc = parse_document(json_text);
  if (!doc.is_object()) throw MalformedConfig("instance must be a JSON object");
  if (!doc.contains("classes") || !doc["classes"].is_array() || doc["classes"].empty())
    throw MalformedConfig("instance needs a non-empty 'classes' array");
  if (!doc.contains("catalog") || !doc["catalog"].is_object())
    throw MalformedConfig("instance needs a 'catalog' object");

  bool any_fraction = false;
  bool any_count = false;
  std::vector<ServerClass> classes;
  for (const auto& item : doc["classes"]) {
    if (!item.contains("bandwidth") || !item.contains("cache_size"))
      throw MalformedConfig("every class needs 'bandwidth' and 'cache_size'");
    ServerClass cls;
    cls.bandwidth = item["bandwidth"].get<int>();
    cls.cache_size = item["cache_size"].get<int>();
    if (item.contains("fraction")) {
      any_fraction = true;
      cls.fraction = item["fraction"].get<double>();
    }
    if (item.contains("count")) {
      any_count = true;
      cls.count = item["count"].get<long>();
    }
    classes.push_back(cls);
  }
  if (any_fraction == any_count)
    throw MalformedConfig(
        "classes must all carry 'fraction' or all carry 'count'");
  const FleetMode mode = any_fraction ? FleetMode::fractions : FleetMode::counts;

  long n = 0;
  if (doc.contains("n"))
    n = doc["n"].get<long>();
  else if (mode == FleetMode::fractions)
    throw MalformedConfig("fraction-mode instance needs 'n'");

  const json& catalog = doc["catalog"];
  if (catalog.contains("rates")) {
    std::vector<double> rates = catalog["rates"].get<std::vector<double>>();
    return make_spec(n, std::move(classes), std::move(rates), mode);
  }
  if (catalog.contains("generator")) {
    const json& gen = catalog["generator"];
    if (!gen.contains("m") || !gen.contains("eta"))
      throw MalformedConfig("catalog generator needs 'm' and 'eta'");
    const int m = gen["m"].get<int>();
    const double eta = gen["eta"].get<double>();
    if (gen.contains("rho"))
      return make_zipf_spec(n, std::move(classes), m, eta,
                            gen["rho"].get<double>(), mode);
    if (gen.contains("total_rate")) {
      auto shape = zipf_rates(m, eta);
      const double total = gen["total_rate"].get<double>();
      for (double& r : shape) r *= total;
      return make_spec(n, std::move(classes), std::move(shape), mode);
    }
    throw MalformedConfig("catalog generator needs 'rho' or 'total_rate'");
  }
  throw MalformedConfig("catalog needs 'rates' or 'generator'");
}

SystemSpec load_spec(const std::string& path) {
  return parse_spec(read_text_file(path));
}

std::string spec_to_json(const SystemSpec& spec) {
  json doc;
  doc["n"] = spec.n;
  json classes = json::array();
  for (const auto& cls : spec.classes) {
    json item;
    item["bandwidth"] = cls.bandwidth;
    item["cache_size"] = cls.cache_size;
    if (spec.mode == FleetMode::fractions)
      item["fraction"] = cls.fraction;
    else
      item["count"] = cls.count;
    classes.push_back(std::move(item));
  }
  doc["classes"] = std::move(classes);
  doc["catalog"]["rates"] = spec.catalog.rates;
  return doc.dump(2);
}

std::string allocation_to_json(const Allocation& alloc) {
  json doc = json::object();
  for (int s = 0; s < alloc.num_servers(); ++s) {
    json contents = json::array();
    for (int c : alloc.stored[static_cast<std::size_t>(s)]) contents.push_back(c + 1);
    doc[std::to_string(s + 1)] = std::move(contents);
  }
  return doc.dump(2);
}

Allocation parse_allocation(const std::string& json_text) {
  const json doc = parse_document(json_text);
  if (!doc.is_object()) throw MalformedConfig("allocation must be a JSON object");
  long max_server = 0;
  for (const auto& [key, value] : doc.items()) {
    long server = 0;
    try {
      server = std::stol(key);
    } catch (const std::exception&) {
      throw MalformedConfig("allocation keys must be 1-based server ids");
    }
    if (server < 1) throw MalformedConfig("allocation keys must be 1-based server ids");
    if (!value.is_array()) throw MalformedConfig("allocation values must be arrays");
    max_server = std::max(max_server, server);
  }
  Allocation alloc;
  alloc.stored.assign(static_cast<std::size_t>(max_server), {});
  for (const auto& [key, value] : doc.items()) {
    const auto server = static_cast<std::size_t>(std::stol(key) - 1);
    for (const auto& c : value) {
      const int content = c.get<int>();
      if (content < 1) throw MalformedConfig("content ids are 1-based");
      alloc.stored[server].push_back(content - 1);
    }
    std::sort(alloc.stored[server].begin(), alloc.stored[server].end());
  }
  return alloc;
}

Allocation load_allocation(const std::string& path) {
  return parse_allocation(read_text_file(path));
}

std::string solve_result_to_json(double value, const Allocation& alloc,
                                 const std::vector<GreedyStep>& trace) {
  json doc;
  doc["value"] = value;
  doc["allocation"] = json::parse(allocation_to_json(alloc));
  json steps = json::array();
  for (const auto& step : trace)
    steps.push_back(json::array({step.server + 1, step.content + 1, step.flow}));
  doc["trace"] = std::move(steps);
  return doc.dump(2);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot open '" + path + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoFailure("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw IoFailure("failed writing '" + path + "'");
}

}  // namespace cdnsim
