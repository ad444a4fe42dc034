#include "exrec/corpus.hpp"

#include "exrec/errors.hpp"
#include "exrec/lineio.hpp"

namespace exrec {

Corpus load_corpus(const std::filesystem::path& path,
                   const TripartiteGraph& graph) {
  Corpus corpus(graph.exercise_count());
  for_each_record(path, [&](std::string_view line, size_t line_no) {
    size_t tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw Error(Errc::malformed_line,
                  path.string() + ":" + std::to_string(line_no) +
                      ": expected `<exercise_id><TAB><text>`");
    }
    std::string_view id = line.substr(0, tab);
    std::string_view text = line.substr(tab + 1);
    auto index = graph.exercise_index(id);
    if (!index) {
      corpus.count_unknown();
      return;
    }
    corpus.set_text(*index, std::string(text));
  });
  return corpus;
}

}  // namespace exrec
