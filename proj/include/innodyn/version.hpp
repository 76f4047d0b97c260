#pragma once

#define INNODYN_VERSION "0.1.0"
