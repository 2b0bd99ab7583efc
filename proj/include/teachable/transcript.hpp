#pragma once

#include "teachable/dialog.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace teachable {

/// Scripted conversation format, one item per line:
///
///   # comment            kept verbatim
///   teaching 3 5 4       teaching queue (article ids)
///   testing 12 13        test queue; the greeting follows as `< ...`
///   > utterance          teacher input
///   ! highlight word     highlight channel
///   ! mode testing       UI mode toggle
///   < reply              agent reply (regenerated)
///   = effect             one line per effect (regenerated)
///
/// Running a script regenerates every `<` and `=` line from the engine and
/// returns the full text; a script replays when the result is byte-identical.
std::string run_transcript(std::string_view script, const ConversationTree& tree, const IntentRules& rules,
                           const DialogEnvironment& env);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace teachable
