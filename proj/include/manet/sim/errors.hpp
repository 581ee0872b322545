#pragma once

#include <stdexcept>
#include <string>

namespace manet {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SchedulingInPast : public Error { public: using Error::Error; };
class InvalidRange : public Error { public: using Error::Error; };
class InvalidConfig : public Error { public: using Error::Error; };
class OutOfRange : public Error { public: using Error::Error; };
class MalformedHeader : public Error { public: using Error::Error; };
class NoPacketsSent : public Error { public: using Error::Error; };
class NoDeliveries : public Error { public: using Error::Error; };
class EmptyInput : public Error { public: using Error::Error; };

class ParseError : public Error {
public:
    ParseError(int line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), m_line(line) {}
    int line() const { return m_line; }

private:
    int m_line;
};

class ValidationError : public Error {
public:
    ValidationError(std::string field, const std::string& what)
        : Error(field + ": " + what), m_field(std::move(field)) {}
    const std::string& field() const { return m_field; }

private:
    std::string m_field;
};

}  // namespace manet
