#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dsrim {

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed input record. Carries the 1-based line number of the offending row.
class ParseError : public Error {
  public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), m_line(line)
    {}

    std::size_t line() const noexcept { return m_line; }

  private:
    std::size_t m_line;
};

class LoadError : public Error {
  public:
    using Error::Error;
};

class LookupError : public Error {
  public:
    using Error::Error;
};

class DimensionError : public Error {
  public:
    using Error::Error;
};

class ConfigError : public Error {
  public:
    using Error::Error;
};

class TrainingError : public Error {
  public:
    using Error::Error;
};

/// A pipeline stage needs an artifact that an earlier command produces.
class MissingArtifactError : public Error {
  public:
    MissingArtifactError(const std::string& artifact, const std::string& producer)
        : Error("missing artifact '" + artifact + "'; run '" + producer + "' first"),
          m_producer(producer)
    {}

    const std::string& producer() const noexcept { return m_producer; }

  private:
    std::string m_producer;
};

/// Collects non-fatal diagnostics. Functions accept a nullable pointer; a null sink drops them.
class Warnings {
  public:
    void add(std::string message) { m_messages.push_back(std::move(message)); }
    const std::vector<std::string>& messages() const noexcept { return m_messages; }
    bool empty() const noexcept { return m_messages.empty(); }
    std::size_t size() const noexcept { return m_messages.size(); }
    void clear() { m_messages.clear(); }

  private:
    std::vector<std::string> m_messages;
};

inline void warn(Warnings* sink, std::string message)
{
    if (sink != nullptr) {
        sink->add(std::move(message));
    }
}

}  // namespace dsrim
