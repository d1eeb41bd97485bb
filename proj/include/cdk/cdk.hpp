#ifndef CDK_CDK_HPP
#define CDK_CDK_HPP

#include "cdk/asymptotics.hpp"
#include "cdk/cdkernel.hpp"
#include "cdk/errors.hpp"
#include "cdk/hilbert.hpp"
#include "cdk/measures.hpp"
#include "cdk/moments.hpp"
#include "cdk/multiindex.hpp"
#include "cdk/point.hpp"

#endif
