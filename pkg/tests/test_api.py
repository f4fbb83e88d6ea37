"""
测试API接口
"""
import math

import pytest
from fastapi.testclient import TestClient

from gml import __version__
from gml.main import app

client = TestClient(app)


class TestRootEndpoints:
    """测试根路径端点"""

    def test_root(self):
        """测试根路径"""
        response = client.get("/")
        assert response.status_code == 200
        data = response.json()
        assert data["version"] == __version__
        assert data["status"] == "running"

    def test_health_check(self):
        """测试健康检查"""
        response = client.get("/health")
        assert response.status_code == 200
        data = response.json()
        assert data["status"] == "healthy"
        assert data["quad_tol"] > 0.0


class TestConstantsAPI:
    """测试常数表接口"""

    def test_constants(self):
        """测试常数表"""
        response = client.get("/api/v1/constants", params={"n_max": 6})
        assert response.status_code == 200
        data = response.json()
        assert data["success"] is True
        rows = data["data"]["rows"]
        assert len(rows) == 6
        assert rows[1][1] == pytest.approx(1.0 / math.pi, rel=1e-15)

    def test_constants_out_of_range(self):
        """测试超出范围返回422"""
        response = client.get("/api/v1/constants", params={"n_max": 30})
        assert response.status_code == 422
        error = response.json()["error"]
        assert error["code"] == "RANGE_ERROR"


class TestDistributionAPI:
    """测试分布计算接口"""

    def test_pdf(self):
        """测试密度求值"""
        response = client.post(
            "/api/v1/pdf", json={"n": 2, "points": [[0.0, 0.0], [1.0, -1.0]]}
        )
        assert response.status_code == 200
        data = response.json()["data"]
        assert data["pdf"][0] == pytest.approx(1.0 / (2.0 * math.pi), rel=1e-12)
        assert data["log_pdf"][1] == pytest.approx(math.log(data["pdf"][1]), rel=1e-12)
        assert data["metadata"]["n"] == 2

    def test_pdf_wrong_point_length(self):
        """测试点的长度不对返回400"""
        response = client.post("/api/v1/pdf", json={"n": 2, "points": [[0.0, 0.0, 0.0]]})
        assert response.status_code == 400
        assert response.json()["error"]["code"] == "SHAPE_ERROR"

    def test_invalid_sigma(self):
        """测试不对称的Σ被请求模型拒绝"""
        response = client.post(
            "/api/v1/moments", json={"n": 2, "sigma": [1.0, 0.5, 0.4, 1.0]}
        )
        assert response.status_code == 422

    def test_moments(self):
        """测试矩"""
        response = client.post("/api/v1/moments", json={"n": 2, "mu": [1.0, 2.0]})
        assert response.status_code == 200
        rows = {row[0]: row[1] for row in response.json()["data"]["rows"]}
        assert rows["mean[1]"] == 2.0
        assert rows["cov_scale"] == pytest.approx(math.log(2.0), rel=1e-11)

    def test_cf(self):
        """测试特征函数"""
        response = client.post(
            "/api/v1/cf",
            json={"n": 2, "r": 0.0, "b": 0.5, "t": [[1.0, 0.5], [0.0, 0.0]]},
        )
        assert response.status_code == 200
        values = response.json()["data"]["values"]
        assert values[0]["re"] == pytest.approx(math.exp(-0.625), rel=1e-10)
        assert values[1] == {"t": [0.0, 0.0], "re": 1.0, "im": 0.0}

    def test_sample(self):
        """测试抽样可复现"""
        payload = {"n": 2, "count": 50, "seed": 9}
        first = client.post("/api/v1/sample", json=payload).json()["data"]
        second = client.post("/api/v1/sample", json=payload).json()["data"]
        assert len(first["draws"]) == 50
        assert first["draws"] == second["draws"]
        assert first["metadata"]["seed"] == 9

    def test_sample_count_limit(self):
        """测试抽样数量上限"""
        response = client.post("/api/v1/sample", json={"n": 2, "count": 200_000})
        assert response.status_code == 422


class TestValidateAPI:
    """测试校验接口"""

    def test_constants_suite(self):
        """测试常数套件"""
        response = client.post("/api/v1/validate/constants", params={"seed": 1})
        assert response.status_code == 200
        body = response.json()
        assert body["success"] is True
        assert body["data"]["suite"] == "constants"
        assert body["data"]["passed"] is True

    def test_sample_count_bounded(self):
        """测试校验样本数超出HTTP上限返回422"""
        response = client.post("/api/v1/validate/moments", params={"count": 10**6})
        assert response.status_code == 422
        response = client.post("/api/v1/validate/moments", params={"count": 10})
        assert response.status_code == 422

    def test_unknown_suite(self):
        """测试未知套件"""
        response = client.post("/api/v1/validate/everything")
        assert response.status_code == 422
