// Copyright 2026 The gpmw Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gpmw/episode_log.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gpmw {

RegretLedger::RegretLedger(int num_actions) : cum_(num_actions, 0.0) {
  if (num_actions < 1) throw ConfigError("RegretLedger: need actions");
}

void RegretLedger::record(int played, std::span<const double> counterfactual) {
  if (counterfactual.size() != cum_.size()) {
    throw InputError("RegretLedger: counterfactual size mismatch");
  }
  if (played < 0 || played >= static_cast<int>(cum_.size())) {
    throw InputError("RegretLedger: played index out of range");
  }
  for (std::size_t a = 0; a < cum_.size(); ++a) cum_[a] += counterfactual[a];
  realized_ += counterfactual[played];
  double best = cum_[0];
  for (double c : cum_) best = std::max(best, c);
  regret_.push_back(best - realized_);
}

double RegretLedger::cumulative_regret() const {
  return regret_.empty() ? 0.0 : regret_.back();
}

std::vector<double> RegretLedger::time_averaged_regret() const {
  std::vector<double> avg(regret_.size());
  for (std::size_t t = 0; t < regret_.size(); ++t) {
    avg[t] = regret_[t] / static_cast<double>(t + 1);
  }
  return avg;
}

std::string format_double(double v) {
  char buf[40];
  // Shortest representation that round-trips exactly.
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, end);
}

void EpisodeLog::set_meta(const std::string& key, const std::string& value) {
  for (auto& kv : meta) {
    if (kv.first == key) {
      kv.second = value;
      return;
    }
  }
  meta.emplace_back(key, value);
}

std::string EpisodeLog::meta_value(const std::string& key) const {
  for (const auto& kv : meta) {
    if (kv.first == key) return kv.second;
  }
  return "";
}

std::string EpisodeLog::serialize() const {
  std::ostringstream os;
  for (const auto& kv : meta) {
    os << "# " << kv.first << "=" << kv.second << "\n";
  }
  os << "round,agent,action,true_reward,noisy_reward,regret,congestion\n";
  for (const auto& r : rows) {
    os << r.round << "," << r.agent << "," << r.action << ","
       << format_double(r.true_reward) << "," << format_double(r.noisy_reward)
       << "," << format_double(r.regret) << ",";
    if (r.has_congestion) os << format_double(r.congestion);
    os << "\n";
  }
  if (!strategies.empty()) {
    os << "## strategies\n";
    os << "round,agent,action,weight\n";
    for (const auto& s : strategies) {
      os << s.round << "," << s.agent << "," << s.action << ","
         << format_double(s.weight) << "\n";
    }
  }
  return os.str();
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc()) throw InputError("log parse: bad number '" + s + "'");
  return v;
}

}  // namespace

EpisodeLog EpisodeLog::deserialize(const std::string& text) {
  EpisodeLog log;
  std::istringstream in(text);
  std::string line;
  bool in_strategies = false;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("## strategies", 0) == 0) {
      in_strategies = true;
      header_seen = false;
      continue;
    }
    if (line[0] == '#') {
      auto eq = line.find('=');
      if (eq != std::string::npos) {
        std::string key = line.substr(2, eq - 2);
        log.meta.emplace_back(key, line.substr(eq + 1));
      }
      continue;
    }
    if (!header_seen) {
      header_seen = true;  // column header
      continue;
    }
    auto cells = split_csv(line);
    if (!in_strategies) {
      if (cells.size() != 7) throw InputError("log parse: bad row '" + line + "'");
      Row r;
      r.round = std::stoi(cells[0]);
      r.agent = std::stoi(cells[1]);
      r.action = std::stoi(cells[2]);
      r.true_reward = parse_double(cells[3]);
      r.noisy_reward = parse_double(cells[4]);
      r.regret = parse_double(cells[5]);
      r.has_congestion = !cells[6].empty();
      if (r.has_congestion) r.congestion = parse_double(cells[6]);
      log.rows.push_back(r);
    } else {
      if (cells.size() != 4) throw InputError("log parse: bad strategy row");
      StrategyRow s;
      s.round = std::stoi(cells[0]);
      s.agent = std::stoi(cells[1]);
      s.action = std::stoi(cells[2]);
      s.weight = parse_double(cells[3]);
      log.strategies.push_back(s);
    }
  }
  return log;
}

void EpisodeLog::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write log file: " + path);
  out << serialize();
}

EpisodeLog EpisodeLog::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read log file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize(ss.str());
}

}  // namespace gpmw
