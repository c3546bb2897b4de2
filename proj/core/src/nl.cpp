#include "clustergen/nl.hpp"

#include <cctype>
#include <fstream>

namespace clustergen::nl {

std::string_view kind_name(PromptKind kind) {
  return kind == PromptKind::kParams ? "params" : "identifier";
}

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyDescription: return "empty_description";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kAuth: return "auth";
    case ErrorCode::kRateLimit: return "rate_limit";
    case ErrorCode::kNetwork: return "network";
    case ErrorCode::kApi: return "api";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kValidation: return "validation";
    case ErrorCode::kIdentifier: return "identifier";
    case ErrorCode::kFixture: return "fixture";
  }
  return "unknown";
}

namespace {

std::string_view trim(std::string_view s) {
  auto space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  while (!s.empty() && space(s.front())) s.remove_prefix(1);
  while (!s.empty() && space(s.back())) s.remove_suffix(1);
  return s;
}

// Drops commas that directly precede a closing bracket, outside strings.
std::string strip_trailing_commas(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool in_string = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      out += c;
      if (c == '\\' && i + 1 < text.size()) out += text[++i];
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    if (c == ',') {
      std::size_t j = i + 1;
      while (j < text.size() && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
      if (j < text.size() && (text[j] == '}' || text[j] == ']')) continue;
    }
    out += c;
  }
  return out;
}

}  // namespace

std::string render_prompt(PromptKind kind, std::string_view description) {
  const std::string_view desc = trim(description);
  if (desc.empty()) throw NlError(ErrorCode::kEmptyDescription, "archetype description is empty");
  const std::string_view tmpl = prompt_template(kind);
  const auto pos = tmpl.rfind(kDescriptionSlot);
  std::string out;
  out.reserve(tmpl.size() + desc.size());
  out.append(tmpl.substr(0, pos));
  out.append(desc);
  out.append(tmpl.substr(pos + kDescriptionSlot.size()));
  return out;
}

nlohmann::json exchange_to_json(const PromptExchange& e) {
  nlohmann::json j;
  j["template_id"] = kind_name(e.kind);
  j["description"] = e.description;
  j["rendered_prompt"] = e.rendered_prompt;
  j["raw_response"] = e.raw_response;
  j["parsed"] = e.parsed ? *e.parsed : nlohmann::json(nullptr);
  j["applied_defaults"] = e.applied_defaults;
  j["attempts"] = e.attempts;
  return j;
}

void append_exchange_log(const std::string& path, const std::vector<PromptExchange>& exchanges) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw Error("cannot open exchange log " + path);
  for (const auto& e : exchanges) out << exchange_to_json(e).dump() << '\n';
}

FixtureCompleter::FixtureCompleter(nlohmann::json fixtures) : fixtures_(std::move(fixtures)) {
  if (!fixtures_.is_object()) throw NlError(ErrorCode::kFixture, "fixture document must be a JSON object");
}

FixtureCompleter FixtureCompleter::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NlError(ErrorCode::kFixture, "cannot open fixture file " + path);
  try {
    return FixtureCompleter(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw NlError(ErrorCode::kFixture, "fixture file " + path + " is not valid JSON: " + e.what());
  }
}

std::string FixtureCompleter::complete(const PromptRequest& request, PromptExchange* exchange) {
  const std::string key(kind_name(request.kind));
  const auto table = fixtures_.find(key);
  if (table == fixtures_.end() || !table->is_object())
    throw NlError(ErrorCode::kFixture, "no fixtures recorded for " + key + " prompts");
  const auto hit = table->find(request.description);
  if (hit == table->end() || !hit->is_string())
    throw NlError(ErrorCode::kFixture, "no " + key + " fixture for description \"" + request.description + "\"");
  if (exchange) exchange->attempts.push_back("fixture");
  return hit->get<std::string>();
}

std::optional<std::string_view> extract_json_object(std::string_view raw) {
  for (std::size_t start = raw.find('{'); start != std::string_view::npos; start = raw.find('{', start + 1)) {
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = start; i < raw.size(); ++i) {
      const char c = raw[i];
      if (in_string) {
        if (c == '\\') ++i;
        else if (c == '"') in_string = false;
        continue;
      }
      if (c == '"') in_string = true;
      else if (c == '{') ++depth;
      else if (c == '}' && --depth == 0) return raw.substr(start, i - start + 1);
    }
    // Unbalanced from this brace on; no later brace can close either.
    break;
  }
  return std::nullopt;
}

Archetype parse_archetype_json(std::string_view raw, const Archetype& defaults,
                               std::vector<std::string>* applied_defaults) {
  const auto block = extract_json_object(raw);
  if (!block) throw NlError(ErrorCode::kParse, "model output contains no JSON object", std::string(raw));
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(*block);
  } catch (const nlohmann::json::parse_error&) {
    try {
      j = nlohmann::json::parse(strip_trailing_commas(*block));
    } catch (const nlohmann::json::parse_error& e) {
      throw NlError(ErrorCode::kParse, std::string("model output is not valid JSON: ") + e.what(),
                    std::string(raw));
    }
  }
  if (!j.is_object()) throw NlError(ErrorCode::kParse, "model output JSON is not an object", std::string(raw));
  try {
    Archetype a = archetype_from_json(j, defaults, applied_defaults);
    require_valid(a);
    return a;
  } catch (const ValidationError& e) {
    throw NlError(ErrorCode::kValidation, std::string("archetype from model output is invalid: ") + e.what(),
                  std::string(raw));
  }
}

std::string parse_identifier(std::string_view raw) {
  const std::string_view id = trim(raw);
  if (!is_identifier(id))
    throw NlError(ErrorCode::kIdentifier, "model output \"" + std::string(raw) + "\" is not a valid identifier",
                  std::string(raw));
  return std::string(id);
}

DescriptionResult archetype_from_description(std::string_view description, Completer& completer,
                                             const Archetype& defaults) {
  DescriptionResult result;
  const std::string desc(trim(description));

  PromptExchange params;
  params.kind = PromptKind::kParams;
  params.description = desc;
  params.rendered_prompt = render_prompt(PromptKind::kParams, desc);
  params.raw_response = completer.complete({PromptKind::kParams, desc, params.rendered_prompt}, &params);
  result.archetype = parse_archetype_json(params.raw_response, defaults, &params.applied_defaults);
  params.parsed = archetype_to_json(result.archetype);
  result.exchanges.push_back(params);

  PromptExchange ident;
  ident.kind = PromptKind::kIdentifier;
  ident.description = desc;
  ident.rendered_prompt = render_prompt(PromptKind::kIdentifier, desc);
  ident.raw_response = completer.complete({PromptKind::kIdentifier, desc, ident.rendered_prompt}, &ident);
  result.archetype.name = parse_identifier(ident.raw_response);
  ident.parsed = result.archetype.name;
  result.exchanges.push_back(ident);
  if (result.exchanges.front().parsed) (*result.exchanges.front().parsed)["name"] = result.archetype.name;
  return result;
}

}  // namespace clustergen::nl
