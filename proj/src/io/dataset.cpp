#include "ddikit/io/dataset.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ddikit/chem/featurize.hpp"
#include "ddikit/chem/smiles.hpp"

namespace ddikit::io {

namespace {

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream iss(line);
  while (std::getline(iss, field, delim)) out.push_back(field);
  if (!line.empty() && line.back() == delim) out.emplace_back();
  return out;
}

std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

struct Table {
  char delim = ',';
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // in file order
};

Table read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("dataset: cannot open " + path);
  Table table;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("dataset: empty file " + path);
  line = strip_cr(line);
  table.delim = line.find('\t') != std::string::npos ? '\t' : ',';
  table.header = split_line(line, table.delim);
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    table.rows.push_back(split_line(line, table.delim));
  }
  if (table.rows.empty()) throw std::runtime_error("dataset: no data rows in " + path);
  return table;
}

std::size_t column_of(const Table& table, const std::string& name, const std::string& path) {
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (table.header[c] == name) return c;
  }
  throw std::runtime_error("dataset: missing column '" + name + "' in " + path);
}

const std::string& cell(const std::vector<std::string>& row, std::size_t col,
                        std::size_t row_number, const std::string& path) {
  if (col >= row.size()) {
    throw std::runtime_error("dataset: row " + std::to_string(row_number) + " of " + path +
                             " is missing fields");
  }
  return row[col];
}

int parse_int(const std::string& text, const char* what, std::size_t row_number) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("dataset: bad " + std::string(what) + " '" + text + "' at row " +
                             std::to_string(row_number));
  }
}

}  // namespace

DatasetBundle load_dataset(const std::string& drugs_path, const std::string& pairs_path) {
  DatasetBundle bundle;

  const Table drugs = read_table(drugs_path);
  const std::size_t id_col = column_of(drugs, "drug_id", drugs_path);
  const std::size_t smiles_col = column_of(drugs, "smiles", drugs_path);

  std::unordered_map<std::string, bool> parse_ok;  // every id in the file
  for (std::size_t r = 0; r < drugs.rows.size(); ++r) {
    const std::size_t row_number = r + 2;  // header is line 1
    const std::string& id = cell(drugs.rows[r], id_col, row_number, drugs_path);
    const std::string& smiles = cell(drugs.rows[r], smiles_col, row_number, drugs_path);
    if (parse_ok.count(id)) {
      throw std::runtime_error("dataset: duplicate drug_id '" + id + "' at row " +
                               std::to_string(row_number));
    }
    try {
      auto mol = chem::parse_smiles(smiles);
      chem::featurize_graph(mol);
      parse_ok[id] = true;
      bundle.id_to_index[id] = static_cast<int>(bundle.data.molecules.size());
      bundle.drug_ids.push_back(id);
      bundle.data.molecules.push_back(std::move(mol));
    } catch (const chem::SmilesError& e) {
      parse_ok[id] = false;
      ++bundle.dropped_molecules;
      bundle.drop_log.push_back("drug row " + std::to_string(row_number) + " (" + id +
                                "): " + e.what());
    }
  }
  if (bundle.data.molecules.empty()) {
    throw std::runtime_error("dataset: every SMILES in " + drugs_path + " failed to parse");
  }

  const Table pairs = read_table(pairs_path);
  const std::size_t a_col = column_of(pairs, "drug_id_1", pairs_path);
  const std::size_t b_col = column_of(pairs, "drug_id_2", pairs_path);
  const std::size_t rel_col = column_of(pairs, "relation_id", pairs_path);
  const std::size_t label_col = column_of(pairs, "label", pairs_path);

  int max_relation = 0;
  for (std::size_t r = 0; r < pairs.rows.size(); ++r) {
    const std::size_t row_number = r + 2;
    const std::string& ida = cell(pairs.rows[r], a_col, row_number, pairs_path);
    const std::string& idb = cell(pairs.rows[r], b_col, row_number, pairs_path);
    for (const auto* id : {&ida, &idb}) {
      if (!parse_ok.count(*id)) {
        throw std::runtime_error("dataset: dangling drug reference '" + *id + "' at row " +
                                 std::to_string(row_number) + " of " + pairs_path);
      }
    }
    if (!parse_ok.at(ida) || !parse_ok.at(idb)) {
      ++bundle.dropped_pairs;
      bundle.drop_log.push_back("pair row " + std::to_string(row_number) +
                                ": references a dropped drug");
      continue;
    }
    data::PairExample ex;
    ex.i = bundle.id_to_index.at(ida);
    ex.j = bundle.id_to_index.at(idb);
    ex.relation = parse_int(cell(pairs.rows[r], rel_col, row_number, pairs_path), "relation_id",
                            row_number);
    ex.label = parse_int(cell(pairs.rows[r], label_col, row_number, pairs_path), "label",
                         row_number);
    if (ex.relation < 0) {
      throw std::runtime_error("dataset: negative relation_id at row " +
                               std::to_string(row_number));
    }
    if (ex.label != 0 && ex.label != 1) {
      throw std::runtime_error("dataset: label must be 0 or 1 at row " +
                               std::to_string(row_number));
    }
    max_relation = std::max(max_relation, ex.relation);
    bundle.data.pairs.push_back(ex);
  }
  bundle.data.relation_count = max_relation + 1;
  return bundle;
}

}  // namespace ddikit::io
