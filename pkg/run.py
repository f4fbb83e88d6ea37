#!/usr/bin/env python3
"""启动脚本"""

import uvicorn

from gml.core.config import settings

if __name__ == "__main__":
    print("启动 GML 分布数值服务...")
    print(f"API文档: http://{settings.host}:{settings.port}/docs")

    uvicorn.run(
        "gml.main:app",
        host=settings.host,
        port=settings.port,
        reload=settings.debug,
        log_level=settings.log_level.lower(),
    )
