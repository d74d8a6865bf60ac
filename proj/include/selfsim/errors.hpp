#pragma once

#include <stdexcept>
#include <string>

namespace selfsim
{

	/// Base of all library errors. Numerical failures derive from NumericalError
	/// so the CLI can map them to a dedicated exit code.
	class Error : public std::runtime_error
	{
	public:
		using std::runtime_error::runtime_error;
	};

	class NumericalError : public Error
	{
	public:
		using Error::Error;
	};

	class NotSpdError : public NumericalError
	{
	public:
		using NumericalError::NumericalError;
	};

	class NoConvergenceError : public NumericalError
	{
	public:
		using NumericalError::NumericalError;
	};

	class SingularJacobianError : public NumericalError
	{
	public:
		using NumericalError::NumericalError;
	};

	class DegenerateEigenspaceError : public NumericalError
	{
	public:
		using NumericalError::NumericalError;
	};

	class UnsupportedValenceError : public Error
	{
	public:
		using Error::Error;
	};

	class CapUnavailableError : public Error
	{
	public:
		using Error::Error;
	};

	/// Invalid user configuration; `field` names the offending setting.
	class ConfigError : public Error
	{
	public:
		ConfigError(std::string field, const std::string &message)
			: Error(field + ": " + message), field_(std::move(field))
		{
		}

		const std::string &field() const { return field_; }

	private:
		std::string field_;
	};

} // namespace selfsim
