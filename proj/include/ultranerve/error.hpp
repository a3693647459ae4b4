#pragma once

#include <stdexcept>
#include <string>

namespace ultranerve {

// Every failure raised by the library derives from Error, so callers that do
// not care about the precise kind can catch one type.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class PrimeMismatch : public Error {
public:
  using Error::Error;
};

class InvalidPrime : public Error {
public:
  using Error::Error;
};

class InvalidArgument : public Error {
public:
  using Error::Error;
};

class NegativeValue : public Error {
public:
  using Error::Error;
};

// Raw distance matrix problems.
class MalformedMatrix : public Error {
public:
  using Error::Error;
};

class AsymmetricMatrix : public MalformedMatrix {
public:
  using MalformedMatrix::MalformedMatrix;
};

class NegativeEntry : public MalformedMatrix {
public:
  using MalformedMatrix::MalformedMatrix;
};

class NonzeroDiagonal : public MalformedMatrix {
public:
  using MalformedMatrix::MalformedMatrix;
};

class NotUltrametric : public Error {
public:
  using Error::Error;
};

class NotSeparated : public Error {
public:
  using Error::Error;
};

class ThresholdBelowDiameter : public Error {
public:
  using Error::Error;
};

class NonNestedCovers : public Error {
public:
  using Error::Error;
};

class ScheduleError : public Error {
public:
  using Error::Error;
};

class UnknownPoint : public Error {
public:
  using Error::Error;
};

class IncoherentThread : public Error {
public:
  using Error::Error;
};

class EmptyComplex : public Error {
public:
  using Error::Error;
};

class UnrealizedComplex : public Error {
public:
  using Error::Error;
};

class MismatchedComplexes : public Error {
public:
  using Error::Error;
};

// Input handling (pipeline).
class ParseError : public Error {
public:
  using Error::Error;
};

class SchemaError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace ultranerve
